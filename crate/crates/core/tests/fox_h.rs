//! H-family values against mpmath `meijerg` and closed forms.

use gammasum::fox_h::{eval_h, HFamilySpec, HParam, Kind};
use gammasum::mellin_barnes::{pole_strip, ContourSpec};

fn g(m: usize, n: usize, a: &[f64], b: &[f64], z: f64) -> HFamilySpec {
    HFamilySpec::new(
        Kind::MeijerG,
        m,
        n,
        a.iter().map(|&v| HParam::plain(v)).collect(),
        b.iter().map(|&v| HParam::plain(v)).collect(),
        z,
    )
    .unwrap()
}

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "got {got}, want {want}");
}

#[test]
fn cahen_mellin() {
    for z in [0.1, 1.0, 2.0, 5.0] {
        let r = eval_h(&g(1, 0, &[], &[0.0], z), None).unwrap();
        close(r.value, (-z).exp(), 1e-9);
    }
}

#[test]
fn binomial_type() {
    // G^{1,1}_{1,1}[z | a; 0] = Γ(1-a) (1+z)^{a-1}
    let r = eval_h(&g(1, 1, &[0.3], &[0.0], 0.5), None).unwrap();
    close(r.value, 0.977_303_207_985_965_7, 1e-9);
}

#[test]
fn mpmath_meijerg_values() {
    // meijerg([[0.3],[1.2]], [[0.1,0.4],[0.9]], 1.7)
    let r = eval_h(&g(2, 1, &[0.3, 1.2], &[0.1, 0.4, 0.9], 1.7), None).unwrap();
    close(r.value, -0.328_326_865_915_873_15, 1e-9);
    // meijerg([[0.2,0.5],[]], [[0.6],[0.1]], 0.4)
    let r = eval_h(&g(1, 2, &[0.2, 0.5], &[0.6, 0.1], 0.4), None).unwrap();
    close(r.value, 0.388_853_101_948_853, 1e-9);
    // meijerg([[0.25],[0.8]], [[0.5,0.75,1.1],[0.3]], 2.5)
    let r = eval_h(&g(3, 1, &[0.25, 0.8], &[0.5, 0.75, 1.1, 0.3], 2.5), None).unwrap();
    close(r.value, 0.104_148_504_826_196_95, 1e-9);
}

#[test]
fn exponential_sum_as_meijer_g() {
    // (e^{-y/Ω1} - e^{-y/Ω2}) / (Ω1 - Ω2) with Ω = (1, 2), y = 1
    let spec = HFamilySpec::with_log_z(
        Kind::MeijerG,
        2,
        0,
        vec![HParam::plain(2.0), HParam::plain(1.5)],
        vec![HParam::plain(1.0), HParam::plain(0.5)],
        -1.0,
    )
    .unwrap();
    let r = eval_h(&spec, None).unwrap();
    close(r.value / 2.0, 0.238_651_218_541_191_1, 1e-9);
}

// Four-way agreement: one value written as G, H (scaled arguments), H-bar
// and H-hat (split exponents).
#[test]
fn reduction_chain_agrees() {
    let z = 0.8;
    let gv = eval_h(&g(2, 1, &[0.3], &[0.1, 0.4], z), None).unwrap().value;

    // Γ(b - s) with s = 2u: H with B = 2 and z^2 gives the same integral / 2.
    let h = HFamilySpec::new(
        Kind::FoxH,
        2,
        1,
        vec![HParam::new(0.3, 2.0, 1.0)],
        vec![HParam::new(0.1, 2.0, 1.0), HParam::new(0.4, 2.0, 1.0)],
        z.powi(2),
    )
    .unwrap();
    let hv = eval_h(&h, None).unwrap().value;
    assert!((2.0 * hv - gv).abs() < 1e-9 * gv.abs(), "{hv} {gv}");

    // Γ(1 - a + s) written as a power with exponent one is H-bar/H-hat.
    let hb = HFamilySpec::new(
        Kind::FoxHbar,
        2,
        1,
        vec![HParam::new(0.3, 1.0, 1.0)],
        vec![HParam::plain(0.1), HParam::plain(0.4)],
        z,
    )
    .unwrap();
    let hbv = eval_h(&hb, None).unwrap().value;
    let hh = HFamilySpec { kind: Kind::ExtHhat, ..hb.clone() };
    let hhv = eval_h(&hh, None).unwrap().value;
    assert!((hbv - gv).abs() < 1e-12 * gv.abs());
    assert!((hhv - gv).abs() < 1e-12 * gv.abs());
}

#[test]
fn fractional_exponents_square_root() {
    // Γ(-s)^2 has G^{2,0}_{0,2}[z | 0, 0] = 2 K_0(2 sqrt z); with exponent 2
    // on a single term the Ĥ form must agree.
    let z: f64 = 0.6;
    let gv = eval_h(&g(2, 0, &[], &[0.0, 0.0], z), None).unwrap().value;
    let hh = HFamilySpec::new(Kind::ExtHhat, 1, 0, vec![], vec![HParam::new(0.0, 1.0, 2.0)], z).unwrap();
    let hv = eval_h(&hh, None).unwrap().value;
    assert!((gv - hv).abs() < 1e-10 * gv.abs(), "{gv} {hv}");
    // 2 K_0(2 sqrt(0.6)) from mpmath: 2*besselk(0, 2*sqrt(0.6))
    close(gv, 0.401_258_983_937_421_77, 1e-9);
}

#[test]
fn permuting_within_slot_groups() {
    let a = eval_h(&g(3, 1, &[0.25, 0.8], &[0.5, 0.75, 1.1, 0.3], 2.5), None).unwrap().value;
    let b = eval_h(&g(3, 1, &[0.25, 0.8], &[1.1, 0.5, 0.75, 0.3], 2.5), None).unwrap().value;
    assert!((a - b).abs() <= 1e-12 * a.abs());
}

#[test]
fn override_contour_is_used() {
    let spec = g(1, 0, &[], &[0.0], 1.0);
    let strip = pole_strip(&spec.terms()).unwrap();
    let c = ContourSpec::bent(-0.5, 40.0).with_tolerances(1e-12, 1e-15);
    assert!(strip.admits(c.anchor));
    let r = eval_h(&spec, Some(&c)).unwrap();
    assert_eq!(r.contour.anchor, -0.5);
    close(r.value, (-1f64).exp(), 1e-11);
}
