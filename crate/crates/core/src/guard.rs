//! Size guards for combinatorial operations.
//!
//! Setting `HAMLP_GUARD_OVERRIDE=1` lifts every n-guard; runs beyond the
//! guards can be very slow.

pub const GUARD_OVERRIDE_ENV: &str = "HAMLP_GUARD_OVERRIDE";

pub fn guards_overridden() -> bool {
    std::env::var(GUARD_OVERRIDE_ENV).map(|v| v == "1").unwrap_or(false)
}
