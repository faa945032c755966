use std::time::Duration;

/// CPU time consumed by the calling thread.
///
/// A run's step loop executes on one thread, so this attributes CPU time to
/// the run even when several runs of a battery share the process.
pub fn thread_cpu_time() -> Duration {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid out-pointer and the clock id is a constant.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return Duration::ZERO;
    }
    Duration::new(ts.tv_sec as u64, ts.tv_nsec as u32)
}

/// Stopwatch over [`thread_cpu_time`].
#[derive(Debug)]
pub struct CpuStopwatch {
    start: Duration,
}

impl CpuStopwatch {
    pub fn start() -> Self {
        Self { start: thread_cpu_time() }
    }

    pub fn elapsed_secs(&self) -> f64 {
        thread_cpu_time().saturating_sub(self.start).as_secs_f64()
    }
}
