//! Deterministic number formatting for reports.

use nscs_core::coherent::ZetaPoint;
use nscs_core::C64;

/// Values smaller than this print as `0` in state reports.
pub const CHOP: f64 = 1e-12;

/// Rounds to 12 significant digits and prints the shortest decimal for the
/// rounded value. Never prints `-0`.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let exp = rounded.abs().log10().floor();
    if (-6.0..=15.0).contains(&exp) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// [`real`] after flushing `|x| < 1e-12` to zero.
pub fn chopped(x: f64) -> String {
    if x.abs() < CHOP {
        "0".into()
    } else {
        real(x)
    }
}

/// `a+bi` form with unit imaginary parts written as `i` / `-i`.
pub fn complex(z: C64) -> String {
    let re = chopped(z.re);
    let im = chopped(z.im);
    let im_term = match im.as_str() {
        "0" => None,
        "1" => Some("i".to_string()),
        "-1" => Some("-i".to_string()),
        s => Some(format!("{s}i")),
    };
    match (re.as_str(), im_term) {
        (_, None) => re,
        ("0", Some(t)) => t,
        (r, Some(t)) if t.starts_with('-') => format!("{r}{t}"),
        (r, Some(t)) => format!("{r}+{t}"),
    }
}

pub fn zeta(z: &ZetaPoint) -> String {
    match z {
        ZetaPoint::Infinity => "∞".into(),
        ZetaPoint::Finite(v) => complex(*v),
    }
}

/// `(x,y,z)` with chopped components.
pub fn triple(v: [f64; 3]) -> String {
    format!("({},{},{})", chopped(v[0]), chopped(v[1]), chopped(v[2]))
}

/// Magnetic quantum number as `-3/2`, `0`, `1`.
pub fn m_label(two_m: i64) -> String {
    if two_m % 2 == 0 {
        format!("{}", two_m / 2)
    } else {
        format!("{two_m}/2")
    }
}
