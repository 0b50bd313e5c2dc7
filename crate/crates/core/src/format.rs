//! Text output: `%.17g`-style floats and the sweep CSV.

use std::io::Write;

use crate::error::Result;
use crate::scattering::SweepRow;

pub const SWEEP_HEADER: &str = "theta,omega,phi,v_rel,E,degenerate";

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// exponent form outside `1e-5 <= |x| < 1e17`. Non-finite values print as
/// `nan`, `inf`, `-inf`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_g17(r.theta),
            fmt_g17(r.omega),
            fmt_g17(r.phi),
            fmt_g17(r.v_rel),
            fmt_g17(r.e),
            r.degenerate
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(std::f64::consts::FRAC_PI_2), "1.5707963267948966");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(f64::NAN), "nan");
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(123456.0), "123456");
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = [
            SweepRow { theta: 1.0, omega: 0.0, phi: 0.0, v_rel: 1.5, e: 0.25, degenerate: false },
            SweepRow { theta: 2.0, omega: 0.0, phi: 0.0, v_rel: 1.5, e: f64::NAN, degenerate: true },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "theta,omega,phi,v_rel,E,degenerate\n1,0,0,1.5,0.25,false\n2,0,0,1.5,nan,true\n");
    }

    proptest! {
        #[test]
        fn g17_roundtrips_exactly(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
