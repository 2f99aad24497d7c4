//! Generates a key registry file for a producer prefix and a list of
//! consumer ids.
//!
//! ```text
//! cargo run -p crsd-crypto --example gen_keys -- lci:/acme mac 7 cr31 cr32
//! ```
//!
//! Arguments: prefix, tag scheme (mac|sig), seed, consumer ids. The
//! output goes to stdout in the format `KeyRegistry::from_file` reads.

use bytes::Bytes;
use ccn_core::Name;
use crsd_crypto::{KeyRegistry, TagScheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 4 {
        eprintln!("usage: gen_keys <prefix> <mac|sig> <seed> <consumer-id>...");
        std::process::exit(2);
    }
    let prefix = Name::parse(&args[0]).expect("valid lci prefix");
    let scheme = TagScheme::parse(&args[1]).expect("mac or sig");
    let seed: u64 = args[2].parse().expect("integer seed");
    let consumers: Vec<Bytes> = args[3..]
        .iter()
        .map(|s| Bytes::copy_from_slice(s.as_bytes()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = KeyRegistry::generate(&mut rng, &prefix, &consumers, scheme);
    print!("{}", registry.to_file_string());
}
