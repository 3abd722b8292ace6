use voazhu_core::bimodule::*;
use voazhu_core::formal::{frac, int};
use voazhu_core::sample::Sampler;
use voazhu_core::window::Status;
use voazhu_core::zhu::{circ_n_v, weight_shift, ZhuContext};
use voazhu_core::{BasisVector, Generator, GradedVector, Module, Voa};

fn a(parts: &[u32]) -> GradedVector {
    GradedVector::basis(BasisVector::of(Generator::Alpha, parts))
}

fn ab(parts: &[u32]) -> BasisVector {
    BasisVector::of(Generator::Alpha, parts)
}

fn gv(b: &BasisVector) -> GradedVector {
    GradedVector::basis(b.clone())
}

fn certified(cache: &BimoduleCache, n: u32, x: &GradedVector, d: u32) -> bool {
    cache.membership_with_retry(n, x, d, 2, 24).cert.certified()
}

#[test]
fn left_action_examples() {
    let lam = frac(3, 2);
    let f = Module::heisenberg_fock(lam.clone());
    let low = GradedVector::lowest();
    assert_eq!(left_star(&f, 0, &a(&[1]), &low).unwrap(), a(&[1]).plus(&low.scaled(&lam)));
    let h = Voa::heisenberg();
    for n in 0..4 {
        let w = a(&[2, 1]);
        assert_eq!(left_star(&f, n, &h.vacuum(), &w).unwrap(), w);
    }
    // Res_x x^{-1}(1+x)^2 Y(ω,x)|λ⟩ = (L(-2) + 2L(-1) + L(0))|λ⟩
    // = ½α(-1)²|λ⟩ + λα(-2)|λ⟩ + 2λα(-1)|λ⟩ + ½λ²|λ⟩
    let got = left_star(&f, 0, &h.omega(), &low).unwrap();
    let mut want = a(&[1, 1]).scaled(&frac(1, 2));
    want.add_scaled(&a(&[2]), &lam);
    want.add_scaled(&a(&[1]), &(&lam * int(2)));
    want.add_scaled(&low, &(&lam * &lam / int(2)));
    assert_eq!(got, want);
}

#[test]
fn right_action_examples() {
    let h = Voa::heisenberg();
    let lam = int(1);
    let f = Module::heisenberg_fock(lam.clone());
    let low = GradedVector::lowest();
    assert_eq!(right_star(&f, 0, &low, &h.vacuum()).unwrap(), low);
    for n in 0..3 {
        assert_eq!(right_star_alt(&f, n, &low, &h.vacuum()).unwrap(), low);
    }
    // for N ≥ 1 the vacuum is a right unit only modulo O_N(W)
    let cache = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    for n in 1..3 {
        let x = right_star(&f, n, &low, &h.vacuum()).unwrap();
        assert_ne!(x, low);
        assert!(certified(&cache, n, &x.minus(&low), 2 * n + 4));
    }
    // at N = 0 the residue against x^{-1}(1+x)^{wt w} picks Y_WV modes -1 and 0
    let w = ab(&[]);
    let mut want = GradedVector::zero();
    let wt = f.weight(&w);
    for (k, c) in [(-1i64, int(1)), (0, wt.clone())] {
        want.add_scaled(&voazhu_core::voa::ywv_mode(&f, &gv(&w), k, &a(&[1])), &c);
    }
    assert_eq!(right_star(&f, 0, &gv(&w), &a(&[1])).unwrap(), want);
}

#[test]
fn the_algebra_as_a_bimodule_over_itself() {
    let h = Voa::heisenberg();
    let m = &h.module;
    let mut s = Sampler::new(4);
    for _ in 0..20 {
        let u = gv(&s.basis(m, 0, 3));
        let w = gv(&s.basis(m, 0, 3));
        // left action and the O_N(W) generators reduce to the algebra's product and circ
        assert_eq!(left_star(m, 1, &u, &w).unwrap(), voazhu_core::zhu::star(m, 1, &u, &w).unwrap());
        assert_eq!(circ_w(m, 1, &u, &w).unwrap(), circ_n_v(m, 1, &u, &w, 1).unwrap());
        // Y_VV is Y, so the right action formula is the algebra's product with w on the left
        for n in 0..3 {
            assert_eq!(right_star(m, n, &w, &u).unwrap(), voazhu_core::zhu::star(m, n, &w, &u).unwrap());
        }
    }
    // the unit behaves the same on both sides modulo the shift family
    let cache = BimoduleCache::new(&h, m.clone(), Convention::WeightShift).unwrap();
    let u = a(&[2, 1]);
    let x = right_star(m, 0, &u, &h.vacuum()).unwrap().minus(&left_star(m, 0, &h.vacuum(), &u).unwrap());
    assert!(certified(&cache, 0, &x, 7));
    let zc = ZhuContext::new(&h, 0, 7);
    assert!(zc.membership(&x).certified());
}

#[test]
fn circ_generators_examples() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(int(1));
    let cache = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    let x = circ_wv(&f, 0, &GradedVector::lowest(), &a(&[1])).unwrap();
    assert!(cache.context(0, 6).membership(&x).certified());
    let x = circ_wv_deep(&f, 0, &GradedVector::lowest(), &a(&[1]), 1, 0).unwrap();
    assert!(certified(&cache, 0, &x, 6));
    let x = circ_w_deep(&f, 1, &a(&[1]), &a(&[1]), 2, 1).unwrap();
    assert!(certified(&cache, 1, &x, 8));
    assert!(circ_w(&f, 0, &h.vacuum(), &GradedVector::lowest()).unwrap().is_zero());
}

#[test]
fn redundant_deep_generators_do_not_change_the_span() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(frac(1, 2));
    for (n, d) in [(0, 5), (1, 6)] {
        for conv in [Convention::WeightShift, Convention::CircOnly] {
            let plain = BimoduleContext::new(&h, f.clone(), n, d, conv, false).unwrap().enumerate();
            let deep = BimoduleContext::new(&h, f.clone(), n, d, conv, true).unwrap().enumerate();
            assert!(deep.1 >= plain.1);
            // anything the deep family adds must already be reachable at a larger window
            if deep.1 > plain.1 {
                assert!(BimoduleContext::new(&h, f.clone(), n, d + 4, conv, false).unwrap().enumerate().1 >= deep.1);
            }
        }
    }
}

#[test]
fn lemma_examples() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(int(1));
    let cache = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    let c0 = Checker { cache: &cache, n: 0, policy: RetryPolicy::default() };
    for r in c0.lemma_parts(3, &BasisVector::lowest(), &ab(&[1]), 0, 0).unwrap() {
        assert_eq!(r.status, Status::Certified, "{}", r.axiom_id);
        assert_eq!(r.witness_size, 0);
    }
    for r in c0.lemma_parts(1, &ab(&[1]), &BasisVector::lowest(), 0, 0).unwrap() {
        assert_eq!(r.status, Status::Certified, "{}", r.axiom_id);
    }
    let f = Module::heisenberg_fock(frac(1, 2));
    let cache = BimoduleCache::new(&h, f, Convention::WeightShift).unwrap();
    let c1 = Checker { cache: &cache, n: 1, policy: RetryPolicy::default() };
    for r in c1.lemma_parts(3, &ab(&[1, 1]), &ab(&[1]), 0, 0).unwrap() {
        assert_eq!(r.status, Status::Certified, "{}", r.axiom_id);
    }
    for r in c1.lemma_parts(2, &ab(&[1]), &ab(&[1]), 1, 1).unwrap() {
        assert_eq!(r.status, Status::Certified, "{}", r.axiom_id);
    }
    assert!(c1.lemma_parts(2, &ab(&[1]), &ab(&[1]), 0, 1).is_err());
    assert!(c1.lemma_parts(4, &ab(&[1]), &ab(&[1]), 0, 0).is_err());
}

#[test]
fn axiom_examples() {
    let h = Voa::heisenberg();
    for conv in [Convention::WeightShift, Convention::CircOnly] {
        let cache = BimoduleCache::new(&h, Module::heisenberg_fock(int(1)), conv).unwrap();
        let c = Checker { cache: &cache, n: 0, policy: RetryPolicy::default() };
        let one = BasisVector::lowest();
        for r in c.axioms(&one, &one, &ab(&[1])).unwrap() {
            assert_eq!(r.status, Status::Certified, "{} {}", conv.name(), r.axiom_id);
        }
        for r in c.axioms(&ab(&[1]), &ab(&[1]), &one).unwrap() {
            assert_eq!(r.status, Status::Certified, "{} {}", conv.name(), r.axiom_id);
        }
    }
    let cache = BimoduleCache::new(&h, Module::heisenberg_fock(frac(1, 2)), Convention::WeightShift).unwrap();
    let c = Checker { cache: &cache, n: 1, policy: RetryPolicy::default() };
    let omega = BasisVector::of(Generator::Alpha, &[1, 1]);
    let reports = c.axioms(&omega, &ab(&[1]), &ab(&[1])).unwrap();
    assert_eq!(reports.len(), 11);
    assert!(reports.iter().all(|r| r.status == Status::Certified));
}

#[test]
fn axioms_hold_without_the_shift_family() {
    // with the right action *'_N the circ family alone is stable under both actions
    let cases = [
        (Voa::heisenberg(), Module::heisenberg_fock(frac(1, 2))),
        (Voa::virasoro(frac(1, 2)), Module::virasoro_verma(frac(1, 2), frac(1, 16))),
    ];
    for (voa, m) in cases {
        let cache = BimoduleCache::new(&voa, m.clone(), Convention::CircOnly).unwrap();
        let mut s = Sampler::derived(42, m.id());
        for n in 0..=1 {
            let c = Checker { cache: &cache, n, policy: RetryPolicy::default() };
            for _ in 0..6 {
                let (u, v, w) = (s.basis(&voa.module, 0, 2), s.basis(&voa.module, 0, 2), s.basis(&m, 0, 2));
                for r in c.axioms(&u, &v, &w).unwrap() {
                    assert_eq!(r.status, Status::Certified, "{} N={n} {} {:?}", m.id(), r.axiom_id, r.inputs);
                }
            }
        }
    }
}

#[test]
fn actions_descend_through_enumerated_generators() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(int(1));
    let cache = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    let n = 0;
    let us = [ab(&[1]), ab(&[2]), ab(&[1, 1])];
    for u in &us {
        for w in f.basis_up_to(1) {
            let g = circ_w(&f, n, &gv(u), &gv(&w)).unwrap();
            let sh = weight_shift(&f, &gv(&w));
            for x in [ab(&[1]), BasisVector::lowest()] {
                for gen in [&g, &sh] {
                    let d = gen.max_depth().unwrap_or(0) + x.depth() + 4;
                    assert!(certified(&cache, n, &left_star(&f, n, &gv(&x), gen).unwrap(), d), "{x} * gen({u},{w})");
                    assert!(certified(&cache, n, &right_star(&f, n, gen, &gv(&x)).unwrap(), d), "gen({u},{w}) * {x}");
                }
            }
        }
    }
}

#[test]
fn algebra_ideal_acts_trivially() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(frac(1, 2));
    let cache = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    let n = 0;
    for u in [ab(&[1]), ab(&[2])] {
        for v in [BasisVector::lowest(), ab(&[1])] {
            for k in 1..=2 {
                let q = circ_n_v(&h.module, n, &gv(&u), &gv(&v), k).unwrap();
                for w in f.basis_up_to(1) {
                    let d = q.max_depth().unwrap_or(0) + w.depth() + 4;
                    assert!(certified(&cache, n, &left_star(&f, n, &q, &gv(&w)).unwrap(), d));
                    assert!(certified(&cache, n, &right_star(&f, n, &gv(&w), &q).unwrap(), d));
                }
            }
        }
    }
}

#[test]
fn right_actions_agree_modulo_the_quotient() {
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(frac(1, 2));
    let cache = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    let mut s = Sampler::new(17);
    for n in 0..=1 {
        for _ in 0..8 {
            let u = gv(&s.basis(&h.module, 0, 2));
            let w = gv(&s.basis(&f, 0, 2));
            let x = right_star(&f, n, &w, &u).unwrap().minus(&right_star_alt(&f, n, &w, &u).unwrap());
            assert!(certified(&cache, n, &x, x.max_depth().unwrap_or(0) + 2 * n + 4));
        }
    }
}

#[test]
fn shift_family_forces_equal_lowest_weights() {
    // (L(-1)+L(0)_s)|λ⟩ sits in O_0(F_λ) under the first convention but not the second
    let h = Voa::heisenberg();
    let f = Module::heisenberg_fock(int(1));
    let x = weight_shift(&f, &GradedVector::lowest());
    let ws = BimoduleCache::new(&h, f.clone(), Convention::WeightShift).unwrap();
    let co = BimoduleCache::new(&h, f, Convention::CircOnly).unwrap();
    assert!(ws.context(0, 4).membership(&x).certified());
    assert!(!co.membership_with_retry(0, &x, 4, 2, 8).cert.certified());
}

#[test]
fn modules_of_other_algebras_are_rejected() {
    let v = Voa::virasoro(frac(1, 2));
    assert!(BimoduleCache::new(&v, Module::heisenberg_fock(int(1)), Convention::CircOnly).is_err());
    assert!(BimoduleContext::new(&v, Module::virasoro_verma(int(1), int(0)), 0, 2, Convention::CircOnly, false).is_err());
}

#[test]
fn report_serializes_with_window_key() {
    let h = Voa::heisenberg();
    let cache = BimoduleCache::new(&h, Module::heisenberg_fock(int(1)), Convention::WeightShift).unwrap();
    let c = Checker { cache: &cache, n: 0, policy: RetryPolicy::default() };
    let r = &c.axioms(&BasisVector::lowest(), &BasisVector::lowest(), &BasisVector::lowest()).unwrap()[0];
    let v = serde_json::to_value(r).unwrap();
    for k in ["axiom_id", "inputs", "status", "window_D", "witness_size"] {
        assert!(v.get(k).is_some(), "{k}");
    }
}
