use std::sync::Arc;

use num_traits::Zero;
use voazhu_core::formal::{frac, int, Scalar};
use voazhu_core::sample::Sampler;
use voazhu_core::voa::*;
use voazhu_core::{BasisVector, Generator, GradedVector};

fn a(parts: &[u32]) -> GradedVector {
    GradedVector::basis(BasisVector::of(Generator::Alpha, parts))
}

fn l(parts: &[u32]) -> GradedVector {
    GradedVector::basis(BasisVector::of(Generator::L, parts))
}

fn instances() -> Vec<(Voa, Arc<Module>)> {
    vec![
        (Voa::heisenberg(), Voa::heisenberg().module),
        (Voa::heisenberg(), Module::heisenberg_fock(frac(1, 2))),
        (Voa::virasoro(frac(1, 2)), Voa::virasoro(frac(1, 2)).module),
        (Voa::virasoro(int(1)), Module::virasoro_verma(int(1), frac(1, 4))),
        (Voa::virasoro(int(25)), Voa::virasoro(int(25)).module),
        (Voa::virasoro(frac(1, 2)), Module::virasoro_verma(frac(1, 2), frac(1, 16))),
    ]
}

#[test]
fn mode_examples() {
    let v = Voa::heisenberg();
    assert_eq!(v.module.mode(&a(&[1]), 1, &a(&[1])), a(&[]));
    let w = a(&[3, 1]);
    assert_eq!(v.module.mode(&v.vacuum(), -1, &w), w);
    let f = Module::heisenberg_fock(int(3));
    assert_eq!(f.mode(&v.omega(), 1, &a(&[])), a(&[]).scaled(&frac(9, 2)));
}

#[test]
fn l0_acts_by_weight() {
    // ω₁ = L(0) is the weight operator; weights are computed from the monomial alone
    for (voa, m) in instances() {
        for b in m.basis_up_to(4) {
            let w = GradedVector::basis(b.clone());
            assert_eq!(m.mode(&voa.omega(), 1, &w), w.scaled(&m.weight(&b)), "{} on {b}", m.id());
        }
    }
}

#[test]
fn heisenberg_weight_operator_by_hand() {
    // On α(-1)^k|λ⟩ the weight is λ²/2 + k
    let f = Module::heisenberg_fock(frac(2, 3));
    for k in 0..4 {
        let b = BasisVector::of(Generator::Alpha, &vec![1; k]);
        assert_eq!(f.weight(&b), frac(2, 9) + int(k as i64));
    }
}

#[test]
fn vacuum_axioms_on_random_vectors() {
    let mut s = Sampler::new(11);
    for (voa, m) in instances() {
        for _ in 0..200 / 6 + 1 {
            let w = GradedVector::basis(s.basis(&m, 0, 5));
            assert_eq!(m.mode(&voa.vacuum(), -1, &w), w);
            for k in [-4, -3, -2, 0, 1, 2, 5] {
                assert!(m.mode(&voa.vacuum(), k, &w).is_zero());
            }
        }
    }
}

#[test]
fn lower_truncation_scan() {
    let mut s = Sampler::new(3);
    for (voa, m) in instances() {
        for _ in 0..10 {
            let u = s.basis(&voa.module, 0, 3);
            let w = s.basis(&m, 0, 3);
            // wt(u_n w) = wt u - n - 1 + wt w must stay at or above the lowest weight
            let top = u.depth() as i64 + w.depth() as i64 - 1;
            for n in top + 1..top + 21 {
                assert!(m.mode(&GradedVector::basis(u.clone()), n, &GradedVector::basis(w.clone())).is_zero());
            }
        }
    }
}

#[test]
fn outputs_are_homogeneous_of_the_predicted_weight() {
    let mut s = Sampler::new(5);
    for (voa, m) in instances() {
        for _ in 0..20 {
            let u = s.basis(&voa.module, 0, 3);
            let w = s.basis(&m, 0, 3);
            let n = s.int(-3, 3);
            let out = m.mode(&GradedVector::basis(u.clone()), n, &GradedVector::basis(w.clone()));
            let want = voa.module.weight(&u) - int(n + 1) + m.weight(&w);
            for (b, _) in out.terms() {
                assert_eq!(m.weight(b), want);
            }
        }
    }
}

#[test]
fn derivative_property() {
    // Y(L(-1)u, x) = d/dx Y(u, x): (L(-1)u)_n = -n u_{n-1}
    let mut s = Sampler::new(8);
    for (voa, m) in instances() {
        for _ in 0..15 {
            let u = GradedVector::basis(s.basis(&voa.module, 0, 3));
            let w = GradedVector::basis(s.basis(&m, 0, 3));
            let n = s.int(-3, 3);
            let lhs = m.mode(&voa.module.l_minus1(&u), n, &w);
            assert_eq!(lhs, m.mode(&u, n - 1, &w).scaled(&int(-n)));
        }
    }
}

#[test]
fn commutator_examples() {
    let h = Voa::heisenberg();
    assert!(commutator_check(&h, &h.module, &a(&[1]), 1, &a(&[1]), -1, &h.vacuum()));
    assert!(commutator_check(&h, &h.module, &h.omega(), 0, &h.omega(), 1, &a(&[1])));
    let v = Voa::virasoro(frac(1, 2));
    assert!(commutator_check(&v, &v.module, &v.omega(), 2, &v.omega(), -2, &v.vacuum()));
    // the central term shows up: L(1)L(-1)... on the vacuum, [L(1),L(-3)] 𝟏 = 4 L(-2) 𝟏
    let lhs = v.module.virasoro(1, &v.module.virasoro(-3, &v.vacuum()));
    assert_eq!(lhs, l(&[2]).scaled(&int(4)));
}

#[test]
fn commutator_formula_on_samples() {
    for (voa, m) in instances() {
        let mut s = Sampler::derived(42, m.id());
        for _ in 0..100 {
            let u = GradedVector::basis(s.basis(&voa.module, 0, 4));
            let v = GradedVector::basis(s.basis(&voa.module, 0, 4));
            let w = GradedVector::basis(s.basis(&m, 0, 4));
            let (mm, nn) = (s.int(-2, 3), s.int(-2, 3));
            assert!(commutator_check(&voa, &m, &u, mm, &v, nn, &w), "{} {mm} {nn}", m.id());
        }
    }
}

#[test]
fn skew_symmetric_operator_on_the_algebra_is_the_vertex_operator() {
    // Y_VV(w,x)u = e^{xL(-1)}Y(u,-x)w = Y(w,x)u by skew symmetry
    for voa in [Voa::heisenberg(), Voa::virasoro(frac(1, 2)), Voa::virasoro(int(25))] {
        let mut s = Sampler::derived(1, &voa.id());
        for _ in 0..100 / 3 + 1 {
            let w = GradedVector::basis(s.basis(&voa.module, 0, 4));
            let u = GradedVector::basis(s.basis(&voa.module, 0, 4));
            let n = s.int(-4, 3);
            assert_eq!(ywv_mode(&voa.module, &w, n, &u), voa.module.mode(&w, n, &u));
        }
    }
}

#[test]
fn skew_symmetric_operator_examples() {
    let h = Voa::heisenberg();
    let u = a(&[2, 1]);
    assert_eq!(ywv_mode(&h.module, &h.vacuum(), -1, &u), u);
    assert_eq!(ywv_mode(&h.module, &a(&[1]), -2, &h.vacuum()), a(&[2]));
    // on |λ⟩ against α(-1)𝟏 the x^{-1} coefficient is -α(0)|λ⟩ = -λ|λ⟩
    let f = Module::heisenberg_fock(frac(3, 2));
    assert_eq!(ywv_mode(&f, &a(&[]), 0, &a(&[1])), a(&[]).scaled(&frac(-3, 2)));
}

#[test]
fn opposite_operator_on_primaries() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(frac(1, 2));
    let mut s = Sampler::new(9);
    for _ in 0..20 {
        let w = GradedVector::basis(s.basis(&f, 0, 3));
        let n = s.int(-3, 3);
        // α(-1)𝟏 is primary of weight 1
        assert_eq!(opposite_mode(&h, &f, &a(&[1]), n, &w), f.mode(&a(&[1]), -n, &w).scaled(&int(-1)));
        // ω is quasi-primary of weight 2: Y^o_n(ω) = L(1-n)
        assert_eq!(opposite_mode(&h, &f, &h.omega(), n, &w), f.virasoro(1 - n, &w));
    }
    let w = a(&[2]);
    assert_eq!(opposite_mode(&h, &f, &h.vacuum(), -1, &w), w);
}

#[test]
fn contragredient_pairing() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(frac(1, 2));
    let window = f.basis_up_to(2);
    for v in [a(&[1]), h.omega(), h.vacuum(), a(&[2])] {
        for n in -2..3 {
            for wd in &window {
                for w in &window {
                    assert!(contragredient_pairing_check(&h, &f, &v, n, &GradedVector::basis(wd.clone()), &GradedVector::basis(w.clone())));
                }
            }
        }
    }
    // L'(0) = L(0)
    let low = GradedVector::lowest();
    assert_eq!(contragredient_mode(&h, &f, &h.omega(), 1, &low), low.scaled(&frac(1, 8)));
}

#[test]
fn conjugation_by_the_weight_operator() {
    // y^{L(0)_s} u_n y^{-L(0)_s} = y^{wt u - n - 1} u_n on homogeneous vectors
    let voa = Voa::virasoro(frac(1, 2));
    let m = Module::virasoro_verma(frac(1, 2), frac(1, 16));
    let mut s = Sampler::new(21);
    for _ in 0..30 {
        let u = s.basis(&voa.module, 0, 3);
        let w = GradedVector::basis(s.basis(&m, 0, 3));
        let n = s.int(-2, 3);
        let got = conjugated_mode(&m, &u, n, &w);
        let plain = m.mode(&GradedVector::basis(u.clone()), n, &w);
        if plain.is_zero() {
            assert!(got.is_empty());
        } else {
            let e = voa.module.weight(&u) - int(n + 1);
            assert_eq!(got.len(), 1);
            assert_eq!(got.get(&e), Some(&plain));
        }
    }
    // L(-1) picks up y¹
    let got = conjugated_mode(&m, &BasisVector::of(Generator::L, &[2]), 0, &GradedVector::lowest());
    assert_eq!(got.keys().cloned().collect::<Vec<Scalar>>(), vec![int(1)]);
    let marked = l0s_conjugate(&m, &GradedVector::lowest(), false);
    assert_eq!(marked.keys().next(), Some(&frac(1, 16)));
    let vac = l0s_conjugate(&voa.module, &voa.vacuum(), false);
    assert!(vac.keys().next().unwrap().is_zero());
}

#[test]
fn dimensions_by_depth() {
    assert_eq!(Module::heisenberg_fock(int(1)).dims_by_depth(6), vec![1, 1, 2, 3, 5, 7, 11]);
    assert_eq!(Module::virasoro_vacuum(frac(1, 2)).dims_by_depth(6), vec![1, 0, 1, 1, 2, 2, 4]);
}

#[test]
fn parsing_and_descriptors() {
    assert_eq!(Module::parse("heisenberg").unwrap().lowest_weight(), int(0));
    assert_eq!(Module::parse("fock:1/2").unwrap().lowest_weight(), frac(1, 8));
    assert_eq!(Module::parse("verma:c=1/2,h=1/16").unwrap().lowest_weight(), frac(1, 16));
    assert_eq!(Module::parse("virasoro:c=25").unwrap().central_charge(), int(25));
    assert!(Module::parse("lattice:2").is_err());
    for m in ["fock:-3/2", "verma:c=1,h=1/4", "virasoro:c=1/2"] {
        let m = Module::parse(m).unwrap();
        let d = m.descriptor(4);
        let back = Module::from_descriptor(&serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap()).unwrap();
        assert_eq!(back.id(), m.id());
        assert_eq!(back.dims_by_depth(4), m.dims_by_depth(4));
    }
    let v = Voa::parse("virasoro:c=1/2").unwrap();
    assert!(v.acts_on(&Module::virasoro_verma(frac(1, 2), int(0))));
    assert!(!v.acts_on(&Module::heisenberg_fock(int(0))));
}
