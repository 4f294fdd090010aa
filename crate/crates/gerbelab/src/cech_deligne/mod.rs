//! Čech cochains over finite abstract nerves and the Deligne complex.

pub mod cech;
pub mod deligne;

pub use cech::{cech_delta, CechCochain, CochainValue, Cover, U1Function, ValueKind};
pub use deligne::{
    curv_of_class, dd_projection, deligne_delta, gauge_shift, is_deligne_cocycle, CocycleReport,
    DeligneCochain, Residual,
};

use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum CechError {
    #[error("invalid nerve: {detail}")]
    InvalidNerve { detail: String },
    #[error("cochains live over different covers")]
    CoverMismatch,
    #[error("invalid cochain: {detail}")]
    InvalidCochain { detail: String },
    #[error("not a cocycle ({} residuals)", residuals.len())]
    NotACocycle { residuals: Vec<deligne::Residual> },
    #[error("inconsistent patches: {detail}")]
    InconsistentPatches { detail: String },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{Poly, PolyForm, Scalar};
    use std::collections::BTreeMap;

    fn two_patch_cover() -> Cover {
        Cover::build(3, vec!["a".into(), "b".into()], vec![vec![0, 1]]).unwrap()
    }

    #[test]
    fn build_cover_validation() {
        assert!(two_patch_cover().contains(&[0, 1]));
        // {a,b,c} without {a,c} must fail
        let bad = Cover::build(
            2,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 2], vec![0, 1], vec![1, 2]],
        );
        assert!(matches!(bad, Err(CechError::InvalidNerve { .. })));
        // full tetrahedral nerve: 4 triple overlaps
        let mut nerve = vec![vec![0, 1, 2, 3]];
        for i in 0..4 {
            for j in i + 1..4 {
                nerve.push(vec![i, j]);
                for k in j + 1..4 {
                    nerve.push(vec![i, j, k]);
                }
            }
        }
        let tetra = Cover::build(
            3,
            (0..4).map(|i| format!("u{i}")).collect(),
            nerve,
        )
        .unwrap();
        assert_eq!(tetra.simplices(2).len(), 4);
    }

    #[test]
    fn delta_face_conventions() {
        let cover = two_patch_cover();
        // 0-cochain of functions f_a: (δ̌f)_{ab} = f_b − f_a
        let fa = Poly::var(3, 0);
        let fb = Poly::var(3, 1);
        let mut entries = BTreeMap::new();
        entries.insert(vec![0], CochainValue::U1(U1Function::from_exponent(fa.clone())));
        entries.insert(vec![1], CochainValue::U1(U1Function::from_exponent(fb.clone())));
        let c = CechCochain::new(cover.clone(), 0, ValueKind::U1, entries).unwrap();
        let d = c.delta();
        assert_eq!(d.value(&[0, 1]).as_u1().exponent, &fb - &fa);
    }

    #[test]
    fn delta_on_1_cochain() {
        // (δ̌A)_{abc} = A_bc − A_ac + A_ab over a triple overlap
        let cover = Cover::build(
            3,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]],
        )
        .unwrap();
        let form = |i: usize| PolyForm::term(3, vec![0], Poly::var(3, i));
        let mut entries = BTreeMap::new();
        entries.insert(vec![0, 1], CochainValue::Form(form(0)));
        entries.insert(vec![0, 2], CochainValue::Form(form(1)));
        entries.insert(vec![1, 2], CochainValue::Form(form(2)));
        let c = CechCochain::new(cover, 1, ValueKind::Form { degree: 1 }, entries).unwrap();
        let d = c.delta();
        let expect = &(&form(2) - &form(1)) + &form(0);
        assert_eq!(*d.value(&[0, 1, 2]).as_form(), expect);
        // δ̌² = 0
        assert!(d.delta().is_trivial());
    }

    fn line_bundle_cocycle() -> DeligneCochain {
        // f_ab = exp(2πi·q), A_a − A_b = dlog f_ab with q = x¹x²
        let cover = two_patch_cover();
        let q = &Poly::var(3, 0) * &Poly::var(3, 1);
        let f = U1Function::from_exponent(q);
        let a_b = PolyForm::term(3, vec![2], Poly::var(3, 0)); // x¹dx³, arbitrary
        let a_a = &a_b + &f.dlog();
        let mut g_entries = BTreeMap::new();
        g_entries.insert(vec![0, 1], CochainValue::U1(f));
        let g = CechCochain::new(cover.clone(), 1, ValueKind::U1, g_entries).unwrap();
        let mut a_entries = BTreeMap::new();
        a_entries.insert(vec![0], CochainValue::Form(a_a));
        a_entries.insert(vec![1], CochainValue::Form(a_b));
        let a = CechCochain::new(cover, 0, ValueKind::Form { degree: 1 }, a_entries).unwrap();
        DeligneCochain::new(1, 1, vec![g, a]).unwrap()
    }

    #[test]
    fn line_bundle_is_cocycle() {
        let c = line_bundle_cocycle();
        let report = is_deligne_cocycle(&c);
        assert!(report.ok, "residuals: {:?}", report.residuals);
        assert!(deligne_delta(&c).is_trivial());
    }

    #[test]
    fn perturbed_cochain_reports_residuals() {
        let c = line_bundle_cocycle();
        let mut bad = c.clone();
        // spoil A on patch a by a non-closed form
        let mut entries: BTreeMap<_, _> = bad.components[1]
            .entries()
            .map(|(s, v)| (s.clone(), v.clone()))
            .collect();
        let spoiled = entries.get(&vec![0usize]).unwrap().as_form()
            + &PolyForm::term(3, vec![1], Poly::var(3, 0));
        entries.insert(vec![0], CochainValue::Form(spoiled));
        bad.components[1] = CechCochain::new(
            bad.cover().clone(),
            0,
            ValueKind::Form { degree: 1 },
            entries,
        )
        .unwrap();
        let report = is_deligne_cocycle(&bad);
        assert!(!report.ok);
        assert!(report.residuals.iter().any(|r| r.simplex == vec![0, 1]));
    }

    #[test]
    fn deligne_delta_squares_to_zero() {
        // an arbitrary non-cocycle 1-cochain in the degree-2 complex
        let cover = two_patch_cover();
        let mut g_entries = BTreeMap::new();
        g_entries.insert(
            vec![0, 1],
            CochainValue::U1(U1Function::from_exponent(&Poly::var(3, 0) * &Poly::var(3, 2))),
        );
        let g = CechCochain::new(cover.clone(), 1, ValueKind::U1, g_entries).unwrap();
        let mut a_entries = BTreeMap::new();
        a_entries.insert(
            vec![0],
            CochainValue::Form(PolyForm::term(3, vec![1], Poly::var(3, 1))),
        );
        a_entries.insert(
            vec![1],
            CochainValue::Form(PolyForm::term(3, vec![0], Poly::var(3, 2))),
        );
        let a = CechCochain::new(cover, 0, ValueKind::Form { degree: 1 }, a_entries).unwrap();
        let c = DeligneCochain::new(2, 1, vec![g, a]).unwrap();
        let dd = deligne_delta(&deligne_delta(&c));
        assert!(dd.is_trivial(), "D² ≠ 0: {dd:?}");
    }

    #[test]
    fn gauge_shift_line_bundle_formulas() {
        let c = line_bundle_cocycle();
        // gauge parameter: h_a = exp(2πi q_a)
        let q0 = Poly::var(3, 2);
        let q1 = &Poly::var(3, 0) * &Poly::var(3, 0);
        let mut h_entries = BTreeMap::new();
        h_entries.insert(vec![0], CochainValue::U1(U1Function::from_exponent(q0.clone())));
        h_entries.insert(vec![1], CochainValue::U1(U1Function::from_exponent(q1.clone())));
        let h0 = CechCochain::new(c.cover().clone(), 0, ValueKind::U1, h_entries).unwrap();
        let h = DeligneCochain::new(1, 0, vec![h0.clone()]).unwrap();
        let shifted = gauge_shift(&c, &h).unwrap();
        assert!(is_deligne_cocycle(&shifted).ok);
        // f̃_ab = f_ab · h_a/h_b
        let f = c.components[0].value(&[0, 1]).as_u1();
        let f_new = shifted.components[0].value(&[0, 1]).as_u1();
        let expect = f.mul(
            &U1Function::from_exponent(q0.clone())
                .mul(&U1Function::from_exponent(q1.clone()).inverse()),
        );
        assert!(f_new.equals(&expect));
        // Ã_a = A_a + dlog h_a
        let a_old = c.components[1].value(&[0]).as_form();
        let a_new = shifted.components[1].value(&[0]).as_form();
        assert_eq!(*a_new, a_old + &U1Function::from_exponent(q0).dlog());
        // curvature unchanged
        assert_eq!(curv_of_class(&c).unwrap(), curv_of_class(&shifted).unwrap());
    }

    #[test]
    fn curv_of_line_bundle() {
        // A_a = −2πi x¹dx² on both patches, trivial transition
        let cover = two_patch_cover();
        let a_form = PolyForm::term(3, vec![1], Poly::var(3, 0)).scale(&-&Scalar::two_pi_i());
        let mut g_entries = BTreeMap::new();
        g_entries.insert(vec![0, 1], CochainValue::U1(U1Function::one(3)));
        let g = CechCochain::new(cover.clone(), 1, ValueKind::U1, g_entries).unwrap();
        let mut a_entries = BTreeMap::new();
        a_entries.insert(vec![0], CochainValue::Form(a_form.clone()));
        a_entries.insert(vec![1], CochainValue::Form(a_form.clone()));
        let a = CechCochain::new(cover, 0, ValueKind::Form { degree: 1 }, a_entries).unwrap();
        let c = DeligneCochain::new(1, 1, vec![g, a]).unwrap();
        let curv = curv_of_class(&c).unwrap();
        let expect =
            PolyForm::term(3, vec![0, 1], Poly::one(3)).scale(&-&Scalar::two_pi_i());
        assert_eq!(curv, expect);
        // flat datum
        let flat = DeligneCochain::zero(c.cover().clone(), 1, 1);
        assert!(curv_of_class(&flat).unwrap().is_zero());
    }

    #[test]
    fn dd_projection_is_homomorphism() {
        let c = line_bundle_cocycle();
        let c2 = c.combine(&c).unwrap();
        let p = dd_projection(&c).unwrap();
        let p2 = dd_projection(&c2).unwrap();
        assert_eq!(p.combine(&p).unwrap(), p2);
        let pd = dd_projection(&c.invert()).unwrap();
        assert_eq!(p.invert(), pd);
    }
}
