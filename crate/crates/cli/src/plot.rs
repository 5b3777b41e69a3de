//! Gnuplot script for a sweep: log gap against log deficit with the
//! certified theorem bounds overlaid.

use std::fmt::Write as _;

use lens_torsion::stability::{theorem_exponent, Theorem, TheoremCertificate, TheoremParams};

/// Gnuplot expression of the theorem shape as a function of `x`.
fn shape_expression(theorem: Theorem, params: &TheoremParams) -> String {
    let half_log = "sqrt(x)*(x < 1 && log(1/sqrt(x)) > 1 ? log(1/sqrt(x)) : 1)";
    match (theorem, params.dimension) {
        (Theorem::T1_1 | Theorem::T1_2, 2) | (Theorem::T1_3, 3) => half_log.to_string(),
        _ => format!("x**{:.17e}", theorem_exponent(theorem, params)),
    }
}

pub fn gnuplot_script(certs: &[TheoremCertificate], params: &TheoremParams) -> String {
    let mut s = String::new();
    s.push_str("# log gap against log deficit; run with gnuplot from this directory\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set key top left\n");
    s.push_str("set logscale xy\n");
    s.push_str("set format xy '%.0e'\n");
    s.push_str("set xlabel 'deficit ||u_nu^2 - R^2||_{1,Sigma}'\n");
    s.push_str("set ylabel 'gap rho_e - rho_i'\n");
    s.push_str("set terminal pngcairo size 900,650\n");
    s.push_str("set output 'sweep.png'\n");
    let mut curves = vec!["'sweep.csv' using 6:7 skip 1 with linespoints pt 7 title 'sweep'".to_string()];
    for (k, c) in certs.iter().enumerate() {
        if !c.applicable || !c.c_min.is_finite() || c.c_min <= 0.0 {
            continue;
        }
        let name = format!("f{k}");
        let _ = writeln!(s, "{name}(x) = {:.17e}*{}", c.c_min, shape_expression(c.theorem, params));
        curves.push(format!("{name}(x) with lines dt 2 title '{} bound'", c.theorem.as_str()));
    }
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(theorem: Theorem, applicable: bool) -> TheoremCertificate {
        TheoremCertificate {
            theorem,
            c_min: 0.2,
            c_refined: 0.2,
            slope: Some(0.9),
            exponent: 0.5,
            applicable,
            pass: applicable,
            verdict: "PASS".into(),
            detail: String::new(),
        }
    }

    #[test]
    fn script_overlays_applicable_bounds() {
        let p = TheoremParams::default();
        let s = gnuplot_script(&[cert(Theorem::T1_1, true), cert(Theorem::T1_2, false), cert(Theorem::T4_8, true)], &p);
        assert!(s.contains("using 6:7"));
        assert!(s.contains("f0(x) = 2.00000000000000011e-1*sqrt(x)"));
        assert!(!s.contains("f1(x)"));
        assert!(s.contains("f2(x) = 2.00000000000000011e-1*x**3.125"));
        assert!(s.contains("T4.8 bound"));
    }
}
