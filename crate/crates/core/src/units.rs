//! Unit conversions at the crate boundary.
//!
//! The numerics run on kilometres for distance and linear milliwatts for
//! power; configuration and logs speak metres, dBm, and dB.

/// Converts a power ratio in decibels to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Converts an absolute power in dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts an absolute power in milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Converts metres to kilometres.
pub fn m_to_km(m: f64) -> f64 {
    m / 1000.0
}

/// Converts kilometres to metres.
pub fn km_to_m(km: f64) -> f64 {
    km * 1000.0
}
