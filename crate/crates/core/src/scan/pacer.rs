use std::time::{Duration, Instant};

/// Fixed-delay timer: each cycle is due one interval after the previous
/// cycle actually started. A late cycle starts immediately; none are skipped.
#[derive(Debug, Clone)]
pub struct Pacer {
    interval: Duration,
    last_start: Option<Instant>,
}

impl Pacer {
    pub fn new(interval: Duration) -> Self {
        Pacer {
            interval,
            last_start: None,
        }
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Time left before the next cycle is due (zero when due or overdue).
    pub fn remaining(&self) -> Duration {
        match self.last_start {
            Some(last) => (last + self.interval).saturating_duration_since(Instant::now()),
            None => Duration::ZERO,
        }
    }

    /// Sleeps until the next cycle is due and marks its start.
    pub fn wait(&mut self) {
        let remaining = self.remaining();
        if !remaining.is_zero() {
            std::thread::sleep(remaining);
        }
        self.mark_start();
    }

    pub fn mark_start(&mut self) {
        self.last_start = Some(Instant::now());
    }
}
