//! Producer-side replay tracking: tumbling time windows of accepted
//! nonces, with a one-window skew allowance in both directions. When a
//! timestamp's window leaves the acceptable range its nonces are evicted,
//! which bounds the tracked set by the request rate times the window.

use std::collections::BTreeSet;

use bytes::Bytes;
use ccn_core::Tick;

use crate::Reject;

/// Default window width in ticks (300 ms at one tick per millisecond).
pub const DEFAULT_WINDOW_TICKS: Tick = 300;

#[derive(Debug, Clone)]
pub struct ReplayWindow {
    width: Tick,
    seen: BTreeSet<(u64, Bytes)>,
}

impl ReplayWindow {
    pub fn new(width: Tick) -> Self {
        assert!(width > 0, "window width must be positive");
        ReplayWindow {
            width,
            seen: BTreeSet::new(),
        }
    }

    pub fn width(&self) -> Tick {
        self.width
    }

    pub fn window_of(&self, t: Tick) -> u64 {
        t / self.width
    }

    /// True when `t`'s window is the current one, or one window away in
    /// either direction (clock-skew allowance).
    pub fn timestamp_acceptable(&self, t: Tick, clock: Tick) -> bool {
        let wt = self.window_of(t);
        let wc = self.window_of(clock);
        wt.abs_diff(wc) <= 1
    }

    /// Checks the timestamp, then accepts the nonce if it was not already
    /// recorded for the same window. Accepting records it. Expired windows
    /// are evicted on the way in.
    pub fn check_and_record(&mut self, nonce: &Bytes, t: Tick, clock: Tick) -> Result<(), Reject> {
        if !self.timestamp_acceptable(t, clock) {
            return Err(Reject::StaleTimestamp);
        }
        let current = self.window_of(clock);
        let horizon = current.saturating_sub(1);
        self.seen = std::mem::take(&mut self.seen)
            .into_iter()
            .filter(|(w, _)| *w >= horizon)
            .collect();
        if !self.seen.insert((self.window_of(t), nonce.clone())) {
            return Err(Reject::Replay);
        }
        Ok(())
    }

    /// Number of nonces currently tracked.
    pub fn tracked(&self) -> usize {
        self.seen.len()
    }
}

impl Default for ReplayWindow {
    fn default() -> Self {
        ReplayWindow::new(DEFAULT_WINDOW_TICKS)
    }
}
