//! Output number formatting shared by every serializer.

/// Rounds to 12 significant decimal digits. Emitted files carry these values
/// so that repeated runs produce byte-identical output.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest text form of [`round_sig12`].
pub fn fmt12(x: f64) -> String {
    format!("{}", round_sig12(x))
}
