//! Density and CDF against closed forms, mpmath inverse-Laplace references
//! and the series oracle.

use gammasum::gamma_sum::*;
use gammasum::incomplete_gamma::regularized_lower;

fn bp(m: &[f64], o: &[f64]) -> BranchParams {
    BranchParams::from_slices(m, o).unwrap()
}

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "got {got:e}, want {want:e}");
}

const FIG_M: [f64; 5] = [0.6, 1.1, 2.0, 3.4, 4.5];

// mpmath invertlaplace (talbot, 30 digits): (L, y, pdf, cdf), Ω_l = 1.
const FIG_REFERENCE: &[(usize, f64, f64, f64)] = &[
    (3, 0.5, 0.057316286693730413, 0.0091402574617318673),
    (3, 2.0, 0.28839458045430919, 0.32286625561985390),
    (3, 5.0, 0.078387631283438164, 0.87921136210155135),
    (3, 10.0, 0.0029164144359455388, 0.99553484389113471),
    (4, 0.5, 0.0010703363631849759, 8.7930453011041308e-5),
    (4, 2.0, 0.17450385782715075, 0.097054435690535105),
    (4, 5.0, 0.14387513835601158, 0.76025022164265039),
    (4, 10.0, 0.0061017868560030731, 0.99073606401180091),
    (5, 0.5, 1.5769818763152154e-6, 7.7604226099256517e-8),
    (5, 2.0, 0.039616359871943468, 0.012331236730358374),
    (5, 5.0, 0.21630108389350168, 0.57084619540721542),
    (5, 10.0, 0.012524617530301408, 0.98106995997130761),
];

#[test]
fn figure_parameter_sets() {
    for &(l, y, p, c) in FIG_REFERENCE {
        let params = bp(&FIG_M[..l], &vec![1.0; l]);
        close(pdf(&params, y).unwrap(), p, 1e-8);
        close(cdf(&params, y).unwrap(), c, 1e-8);
    }
}

#[test]
fn spot_values() {
    close(pdf(&bp(&[1.0], &[1.0]), 1.0).unwrap(), (-1f64).exp(), 1e-10);
    close(pdf(&bp(&[1.0, 1.0], &[1.0, 2.0]), 1.0).unwrap(), 0.238_651_218_541_191_1, 1e-10);
    close(pdf(&bp(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), 2.0).unwrap(), 0.102_034_437_824_309_6, 1e-10);
    close(pdf(&bp(&[0.6, 1.1], &[1.0, 1.0]), 2.0).unwrap(), 0.240_871_062_458_141_51, 1e-9);
    close(pdf(&bp(&[1.5], &[2.0]), 1.0).unwrap(), 0.346_199_226_312_274_33, 1e-10);
    close(cdf(&bp(&[1.0], &[1.0]), 1.0).unwrap(), 1.0 - (-1f64).exp(), 1e-10);
    close(cdf(&bp(&[1.0, 1.0], &[1.0, 1.0]), 2.0).unwrap(), 0.593_994_150_290_161_9, 1e-10);
}

#[test]
fn integer_path_values() {
    let p = bp(&[1.0, 1.0], &[1.0, 2.0]);
    close(pdf_integer(&p, 1.0).unwrap(), 0.238_651_218_541_191_1, 1e-10);
    close(pdf_integer(&bp(&[2.0], &[2.0]), 1.0).unwrap(), (-1f64).exp(), 1e-10);
    let p = bp(&[2.0, 3.0], &[1.0, 2.0]);
    let g = pdf_general(&p, 3.0, &EvalOptions::default()).unwrap().value;
    close(pdf_integer(&p, 3.0).unwrap(), 0.290_139_043_073_180_09, 1e-10);
    close(g, 0.290_139_043_073_180_09, 1e-10);
}

#[test]
fn cdf_single_forms() {
    assert!((cdf_single(1.0, 1.0, 1.0).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15);
    assert!((cdf_single(2.0, 2.0, 2.0).unwrap() - 0.593_994_150_290_161_9).abs() < 1e-15);
    assert_eq!(cdf_single(3.0, 2.0, 0.0).unwrap(), 0.0);
    let tight = EvalOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        ..EvalOptions::default()
    };
    for (m, om) in [(1.0, 1.0), (2.0, 2.0), (3.0, 0.5), (5.0, 4.0)] {
        for g in [0.05, 0.7, 2.0, 9.0] {
            let direct = cdf_single(m, om, g).unwrap();
            let meijer = cdf_integer_with(&bp(&[m], &[om]), g, &tight).unwrap().value;
            assert!((direct - meijer).abs() <= 1e-10 * direct, "m={m} Ω={om} γ={g}: {direct} {meijer}");
        }
    }
}

#[test]
fn lauricella_series() {
    let (v, tail) = pdf_lauricella_oracle(&bp(&[1.5], &[2.0]), 1.0, 400).unwrap();
    close(v, 0.346_199_226_312_274_33, 1e-12);
    assert!((0.0..1e-14).contains(&tail));
    let p = bp(&[0.6, 1.1], &[1.0, 1.0]);
    let (v, _) = pdf_lauricella_oracle(&p, 2.0, 400).unwrap();
    close(pdf(&p, 2.0).unwrap(), v, 1e-6);
    close(v, 0.240_871_062_458_141_51, 1e-12);
    let p = bp(&[1.3, 0.9, 2.2], &[1.0, 0.5, 2.0]);
    let (v, _) = pdf_lauricella_oracle(&p, 1.5, 400).unwrap();
    close(pdf(&p, 1.5).unwrap(), v, 1e-8);
    let (small, _) = pdf_lauricella_oracle(&p, 1e-6, 400).unwrap();
    assert!(small < 1e-12);
    assert!(pdf_lauricella_oracle(&p, 60.0, 30).is_err());
    assert!(pdf_lauricella_oracle(&bp(&[1.0; 4], &[1.0; 4]), 1.0, 100).is_err());
}

#[test]
fn equal_powers_have_no_singularity() {
    // Erlang-2 against Ω2 -> Ω1
    let erlang = |y: f64| y * (-y).exp();
    for eps in [0.0, 1e-9, 1e-6] {
        let p = bp(&[1.0, 1.0], &[1.0, 1.0 + eps]);
        close(pdf(&p, 1.3).unwrap(), erlang(1.3), 1e-5);
    }
    // single-branch Gamma density, non-integer m
    let p = bp(&[2.7], &[1.0]);
    let y: f64 = 0.8;
    let g = |m: f64, y: f64| (m * m.ln() + (m - 1.0) * y.ln() - m * y - gammasum::complex_gamma::ln_gamma(m)).exp();
    close(pdf(&p, y).unwrap(), g(2.7, y), 1e-10);
    close(cdf(&p, y).unwrap(), regularized_lower(2.7, 2.7 * y), 1e-10);
}

#[test]
fn extreme_arguments() {
    let p = bp(&FIG_M, &[1.0; 5]);
    // deep left tail: pdf ~ y^{κ-1}∏x^m/Γ(κ)
    let y = 1e-3;
    let lead = ((11.6 - 1.0) * f64::ln(y) + p.log_prefactor() - gammasum::complex_gamma::ln_gamma(11.6)).exp();
    close(pdf(&p, y).unwrap(), lead, 1e-2);
    // far right tail, ln z = 800 never formed
    let v = pdf(&p, 800.0).unwrap();
    assert!((0.0..1e-200).contains(&v));
    assert!((cdf(&p, 800.0).unwrap() - 1.0).abs() < 1e-12);
    // small κ
    let p = bp(&[0.3, 0.25], &[1.0, 3.0]);
    for y in [1e-4, 0.1, 2.0, 30.0] {
        let (o, _) = if y < 5.0 { pdf_lauricella_oracle(&p, y, 2000).unwrap() } else { (f64::NAN, 0.0) };
        let v = pdf(&p, y).unwrap();
        if o.is_finite() {
            close(v, o, 1e-8);
        }
        assert!(v > 0.0);
    }
}
