//! Birthday-bound collision probability for random nonces.

/// Probability that at least two of `draws` uniform `bits`-bit nonces
/// collide:
///
/// ```text
/// 1 - prod_{i=0}^{draws-1} (2^bits - i) / 2^bits
/// ```
///
/// Evaluated in log space (`ln_1p` / `exp_m1`) so tiny per-term factors
/// do not underflow. More draws than distinct values forces a collision,
/// so the result is exactly 1 there. Cost is linear in `draws`.
pub fn collision_probability(bits: u32, draws: u64) -> f64 {
    assert!(bits >= 1, "nonce must have at least one bit");
    if draws <= 1 {
        return 0.0;
    }
    if bits < 64 && draws > 1u64 << bits {
        return 1.0;
    }
    let space = (bits as f64).exp2();
    let mut log_no_collision = 0.0f64;
    for i in 1..draws {
        log_no_collision += (-(i as f64) / space).ln_1p();
    }
    (-log_no_collision.exp_m1()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_draw_cannot_collide() {
        assert_eq!(collision_probability(1, 0), 0.0);
        assert_eq!(collision_probability(1, 1), 0.0);
        assert_eq!(collision_probability(128, 1), 0.0);
    }

    #[test]
    fn one_bit_two_draws_is_half() {
        // enumerate: draws (0,0) (0,1) (1,0) (1,1); two of four collide
        assert!((collision_probability(1, 2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pigeonhole_forces_one() {
        assert_eq!(collision_probability(1, 3), 1.0);
        assert_eq!(collision_probability(8, 257), 1.0);
        // exactly 2^bits draws can still be a permutation
        assert!(collision_probability(2, 4) < 1.0);
    }

    #[test]
    fn classic_birthday_crossover() {
        // 2^16 space: ~50% collision chance near 302 draws
        let p = collision_probability(16, 302);
        assert!((p - 0.5).abs() < 0.01, "p = {p}");
    }

    #[test]
    fn monotone_in_draws_and_bits() {
        let mut prev = 0.0;
        for s in 0..200 {
            let p = collision_probability(8, s);
            assert!(p >= prev);
            assert!((0.0..=1.0).contains(&p));
            prev = p;
        }
        for bits in 2..20 {
            assert!(collision_probability(bits, 40) >= collision_probability(bits + 1, 40));
        }
    }

    #[test]
    fn large_nonces_make_collisions_unobservable() {
        let p = collision_probability(128, 1_000_000);
        assert!(p < 1e-24, "p = {p}");
    }
}
