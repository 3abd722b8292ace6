//! Batch verification suite with deterministic, machine-readable reports.
//!
//! Every check group draws its samples from its own seeded stream, checks run in
//! parallel, and entries are sorted by (module, check id, input hash) before output.
//! With `normalize` set the report carries no timestamp, so equal configs give
//! byte-identical JSON.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bimodule::{self, AxiomReport, BimoduleCache, Checker, Convention, RetryPolicy};
use crate::error::Result;
use crate::formal::{self, int, parse_scalar, scalar_to_string, Scalar};
use crate::intertwiner::{self, FockIntertwiner, LogIntertwiner};
use crate::sample::Sampler;
use crate::vector::{BasisVector, Generator, GradedVector};
use crate::voa::{commutator_check, Module, Voa};
use crate::window::Status;
use crate::zhu::{o_action, star, weight_shift, ZhuCache};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Algebras for the axiom and quotient checks: `heisenberg`, `virasoro:c=<c>`.
    pub algebras: Vec<String>,
    /// Modules W for Ω, bimodule checks; the algebra is read off the module.
    pub modules: Vec<String>,
    /// Fock momenta (λ, μ) for the intertwiner checks.
    pub fock_pairs: Vec<(String, String)>,
    pub n_range: Vec<u32>,
    /// Depth bound for sampled elements.
    pub sample_depth: u32,
    /// Samples per (group, instance, N).
    pub samples: usize,
    pub window_slack: u32,
    pub window_cap: u32,
    pub retries: u32,
    pub fusion_windows: Vec<u32>,
    pub identity_max_n: u32,
    pub normalize: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            algebras: vec!["heisenberg".into(), "virasoro:c=1/2".into(), "virasoro:c=1".into(), "virasoro:c=25".into()],
            modules: vec!["fock:1/2".into(), "fock:1".into(), "verma:c=1/2,h=1/16".into()],
            fock_pairs: vec![("1".into(), "2".into()), ("1/2".into(), "1/2".into()), ("0".into(), "3".into())],
            n_range: vec![0, 1],
            sample_depth: 2,
            samples: 4,
            window_slack: 4,
            window_cap: 24,
            retries: 1,
            fusion_windows: vec![6, 8],
            identity_max_n: 10,
            normalize: true,
        }
    }
}

impl SuiteConfig {
    fn policy(&self) -> RetryPolicy {
        RetryPolicy { slack: self.window_slack, retries: self.retries, cap: self.window_cap }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntryStatus {
    Pass,
    Fail,
    Certified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub module: String,
    pub check_id: String,
    pub anchor: String,
    pub instance: String,
    pub n: Option<u32>,
    pub inputs: Vec<String>,
    pub input_hash: String,
    pub status: EntryStatus,
    pub window: Option<u32>,
    pub windows_tried: Vec<u32>,
    pub witness_size: usize,
}

impl Entry {
    fn new(module: &str, check_id: &str, anchor: &str, instance: &str, n: Option<u32>, inputs: Vec<String>) -> Self {
        let mut h = Sha256::new();
        h.update(format!("{module}|{check_id}|{instance}|{n:?}|{}", inputs.join(";")));
        let input_hash = h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect();
        Entry {
            module: module.into(),
            check_id: check_id.into(),
            anchor: anchor.into(),
            instance: instance.into(),
            n,
            inputs,
            input_hash,
            status: EntryStatus::Pass,
            window: None,
            windows_tried: Vec::new(),
            witness_size: 0,
        }
    }

    fn exact(mut self, ok: bool) -> Self {
        self.status = if ok { EntryStatus::Pass } else { EntryStatus::Fail };
        self
    }

    fn from_axiom(module: &str, anchor: &str, instance: &str, n: u32, r: AxiomReport) -> Self {
        let mut e = Entry::new(module, &r.axiom_id, anchor, instance, Some(n), r.inputs);
        e.status = match r.status {
            Status::Certified => EntryStatus::Certified,
            Status::Inconclusive => EntryStatus::Inconclusive,
        };
        e.window = Some(r.window_d);
        e.windows_tried = r.windows_tried;
        e.witness_size = r.witness_size;
        e
    }

    pub fn ok(&self) -> bool {
        matches!(self.status, EntryStatus::Pass | EntryStatus::Certified)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub certified: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: SuiteConfig,
    pub summary: Summary,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl Report {
    pub fn from_entries(config: SuiteConfig, mut entries: Vec<Entry>) -> Self {
        entries.sort_by(|a, b| (&a.module, &a.check_id, &a.input_hash).cmp(&(&b.module, &b.check_id, &b.input_hash)));
        let mut summary = Summary::default();
        for e in &entries {
            match e.status {
                EntryStatus::Pass => summary.pass += 1,
                EntryStatus::Fail => summary.fail += 1,
                EntryStatus::Certified => summary.certified += 1,
                EntryStatus::Inconclusive => summary.inconclusive += 1,
            }
        }
        let generated_at = (!config.normalize).then(|| {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        });
        Report { config, summary, entries, generated_at }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The algebra a module is a module for.
pub fn algebra_of(m: &Module) -> Voa {
    match m.generator() {
        Generator::Alpha => Voa::heisenberg(),
        Generator::L => Voa::virasoro(m.central_charge()),
    }
}

fn gv(b: &BasisVector) -> GradedVector {
    GradedVector::basis(b.clone())
}

/// Summation identities for C(m+N,N) and binomial sums.
pub fn formal_checks(max_n: u32) -> Vec<Entry> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        out.push(
            Entry::new("formal", "binomial_sum_delta", "Σ_m C(m+N,N)[(-1)^m(1+x)^{N+1} - (-1)^N(1+x)^m]/x^{N+m+1} = 1", "ℚ", Some(n), vec![])
                .exact(formal::verify_dlm52(n)),
        );
        out.push(
            Entry::new("formal", "binomial_sum_shift", "Σ_m (-1)^m C(m+N,N)[Σ_i Σ_j C(-N-m-1,i)C(m,j)(-1)^i x2^{i+j}/x1^{m+i} - x1^{-m}] = 0", "ℚ", Some(n), vec![])
                .exact(formal::verify_dlm53(n)),
        );
        for i in 0..=n {
            let want = if i == 0 { int(1) } else { int(0) };
            out.push(
                Entry::new("formal", "alternating_sum", "Σ_m C(m+N,N) C(-N-m-1,i-m) = C(N+i,N)(1-1)^i", "ℚ", Some(n), vec![i.to_string()])
                    .exact(formal::verify_alternating_sum(n, i) == want),
            );
        }
    }
    out
}

/// Commutator formula, vacuum axioms, weight bookkeeping and lower truncation on `count`
/// seeded samples of (u, m, v, n, w) with depths ≤ `depth`, acting on `module`.
pub fn voa_checks(voa: &Voa, module: &Arc<Module>, seed: u64, count: usize, depth: u32) -> Vec<Entry> {
    let inst = format!("{} on {}", voa.id(), module.id());
    let mut s = Sampler::derived(seed, &format!("voa/{inst}"));
    let samples: Vec<_> = (0..count)
        .map(|_| {
            let u = s.basis(&voa.module, 0, depth);
            let v = s.basis(&voa.module, 0, depth);
            let w = s.basis(module, 0, depth);
            (u, s.int(-3, 3), v, s.int(-3, 3), w)
        })
        .collect();
    samples
        .par_iter()
        .flat_map_iter(|(u, m, v, n, w)| {
            let inputs = vec![u.to_string(), m.to_string(), v.to_string(), n.to_string(), w.to_string()];
            let (uv, vv, wv) = (gv(u), gv(v), gv(w));
            let comm = commutator_check(voa, module, &uv, *m, &vv, *n, &wv);
            // vacuum: Y(1,x) = id, Y(u,x)1 = e^{xL(-1)}u starts at u_{-1}1 = u
            let vac = module.mode(&voa.vacuum(), -1, &wv) == wv
                && (-1..=2).all(|k| k == -1 || module.mode(&voa.vacuum(), k, &wv).is_zero())
                && voa.module.mode(&uv, -1, &voa.vacuum()) == uv
                && (0..4).all(|k| voa.module.mode(&uv, k, &voa.vacuum()).is_zero());
            let out = module.mode(&uv, *m, &wv);
            let want = u.depth() as i64 - m - 1 + w.depth() as i64;
            let weights = out.terms().all(|(b, _)| b.depth() as i64 == want);
            let top = u.depth() as i64 - 1 + w.depth() as i64;
            let trunc = (1..=20).all(|k| module.mode(&uv, top + k, &wv).is_zero());
            vec![
                Entry::new("voa", "commutator", "[Y_m(u),Y_n(v)] = Σ_j C(m,j) Y_{m+n-j}(Y_j(u)v)", &inst, None, inputs.clone()).exact(comm),
                Entry::new("voa", "vacuum", "Y(1,x) = id and Y(u,x)1|_{x=0} = u", &inst, None, inputs.clone()).exact(vac),
                Entry::new("voa", "weight", "wt Y_n(u)w = wt u - n - 1 + wt w", &inst, None, inputs.clone()).exact(weights),
                Entry::new("voa", "truncation", "Y_n(u)w = 0 for n large", &inst, None, inputs).exact(trunc),
            ]
        })
        .collect()
}

/// Unit, ω-centrality and associativity of *_N modulo O_N(V).
pub fn zhu_checks(cache: &ZhuCache, n: u32, seed: u64, count: usize, depth: u32, policy: RetryPolicy) -> Vec<Entry> {
    let voa = cache.voa().clone();
    let m = voa.module.clone();
    let inst = voa.id();
    let mut s = Sampler::derived(seed, &format!("zhu/{inst}/{n}"));
    let samples: Vec<_> = (0..count)
        .map(|_| (s.basis(&m, 1, depth), s.basis(&m, 1, depth), s.basis(&m, 0, depth)))
        .collect();
    let certify = |id: &str, anchor: &str, inputs: Vec<String>, depth_sum: u32, x: &GradedVector| {
        let out = cache.membership_with_retry(n, x, depth_sum + 2 * n + policy.slack, policy.retries, policy.cap);
        let r = AxiomReport {
            axiom_id: id.into(),
            inputs,
            status: out.cert.status,
            window_d: out.cert.window,
            witness_size: out.cert.witness.len(),
            windows_tried: out.windows_tried,
        };
        Entry::from_axiom("zhu", anchor, &inst, n, r)
    };
    samples
        .par_iter()
        .flat_map_iter(|(u, v, w)| {
            let (uv, vv, wv) = (gv(u), gv(v), gv(w));
            let st = |a: &GradedVector, b: &GradedVector| star(&m, n, a, b).expect("integer weights");
            let one = voa.vacuum();
            let ds = u.depth() + v.depth() + w.depth();
            let x = st(&st(&uv, &vv), &wv).minus(&st(&uv, &st(&vv, &wv)));
            let assoc = certify("associative", "(u *_N v) *_N w - u *_N (v *_N w) ∈ O_N(V)", vec![u.to_string(), v.to_string(), w.to_string()], ds, &x);
            let x = st(&one, &uv).minus(&uv);
            let lunit = certify("unit_left", "1 *_N u - u ∈ O_N(V)", vec![u.to_string()], u.depth(), &x);
            let x = st(&uv, &one).minus(&uv);
            let runit = certify("unit_right", "u *_N 1 - u ∈ O_N(V)", vec![u.to_string()], u.depth(), &x);
            let om = voa.omega();
            let x = st(&om, &uv).minus(&st(&uv, &om));
            let central = certify("omega_central", "ω *_N u - u *_N ω ∈ O_N(V)", vec![u.to_string()], u.depth() + 2, &x);
            vec![assoc, lunit, runit, central]
        })
        .collect()
}

/// o(u *_N v)w = o(u)o(v)w and the bracket form, for w ∈ Ω⁰_N(W).
pub fn omega_checks(module: &Arc<Module>, n: u32, seed: u64, count: usize, depth: u32) -> Vec<Entry> {
    let voa = algebra_of(module);
    let inst = module.id().to_string();
    let mut s = Sampler::derived(seed, &format!("omega/{inst}/{n}"));
    let samples: Vec<_> = (0..count)
        .map(|_| (s.basis(&voa.module, 0, depth), s.basis(&voa.module, 0, depth), s.basis(module, 0, n)))
        .collect();
    let vm = voa.module.clone();
    samples
        .par_iter()
        .flat_map_iter(|(u, v, w)| {
            let (uv, vv, wv) = (gv(u), gv(v), gv(w));
            let inputs = vec![u.to_string(), v.to_string(), w.to_string()];
            let uvp = star(&vm, n, &uv, &vv).expect("integer weights");
            let vup = star(&vm, n, &vv, &uv).expect("integer weights");
            let ou = |x: &GradedVector| o_action(module, &uv, x);
            let ov = |x: &GradedVector| o_action(module, &vv, x);
            let prod = o_action(module, &uvp, &wv) == ou(&ov(&wv));
            let bracket = ou(&ov(&wv)).minus(&ov(&ou(&wv))) == o_action(module, &uvp.minus(&vup), &wv);
            vec![
                Entry::new("omega", "product", "o(u *_N v)w = o(u)o(v)w", &inst, Some(n), inputs.clone()).exact(prod),
                Entry::new("omega", "bracket", "[o(u),o(v)]w = o(u *_N v - v *_N u)w", &inst, Some(n), inputs).exact(bracket),
            ]
        })
        .collect()
}

/// Bimodule congruences for W = `module` under the quotient with the L(-1) family.
pub fn bimodule_checks(cache: &BimoduleCache, n: u32, seed: u64, count: usize, depth: u32, policy: RetryPolicy) -> Vec<Entry> {
    let inst = format!("{}/{}", cache.module.id(), cache.convention.name());
    let vm = cache.voa.module.clone();
    let wm = cache.module.clone();
    // V needs depth ≥ 2 for Virasoro to have anything nontrivial
    let vdepth = depth.max(vm.generator().weight() as u32);
    let mut s = Sampler::derived(seed, &format!("bimodule/{inst}/{n}"));
    let samples: Vec<_> = (0..count)
        .map(|_| {
            let u = s.basis(&vm, 1, vdepth);
            let v = s.basis(&vm, 1, vdepth);
            let w = s.basis(&wm, 0, depth);
            let p = s.int(0, 2) as u32;
            let q = s.int(0, p as i64) as u32;
            (u, v, w, p, q)
        })
        .collect();
    let checker = Checker { cache, n, policy };
    samples
        .par_iter()
        .flat_map_iter(|(u, v, w, p, q)| {
            let mut out = Vec::new();
            for r in checker.axioms(u, v, w).expect("integer weights of V") {
                let anchor = axiom_anchor(&r.axiom_id);
                out.push(Entry::from_axiom("bimodule", anchor, &inst, n, r));
            }
            if cache.convention == Convention::WeightShift {
                for part in 1..=3 {
                    for r in checker.lemma_parts(part, u, w, *p, *q).expect("p >= q") {
                        let anchor = axiom_anchor(&r.axiom_id);
                        out.push(Entry::from_axiom("bimodule", anchor, &inst, n, r));
                    }
                }
            }
            out
        })
        .collect()
}

pub fn axiom_anchor(id: &str) -> &'static str {
    match id {
        "shift_w_times_u" => "(L(-1)w + L(0)_s w) * u ∈ O_N(W)",
        "u_times_shift_w" => "u * (L(-1)w + L(0)_s w) ∈ O_N(W)",
        "circ_w_times_v" => "(u ∘_N w) * v ∈ O_N(W)",
        "v_times_circ_w" => "v * (u ∘_N w) ∈ O_N(W)",
        "shift_u_times_w" => "(L(-1)u + L(0)u) * w ∈ O_N(W)",
        "w_times_shift_u" => "w * (L(-1)u + L(0)u) ∈ O_N(W)",
        "circ_uv_times_w" => "(u ∘_N v) * w ∈ O_N(W)",
        "w_times_circ_vu" => "w * (v ∘_N u) ∈ O_N(W)",
        "left_associative" => "u * (v * w) - (u * v) * w ∈ O_N(W)",
        "right_associative" => "w * (v * u) - (w * v) * u ∈ O_N(W)",
        "actions_commute" => "(u * w) * v - u * (w * v) ∈ O_N(W)",
        "left_via_ywv" => "u *_N w ≡ Σ_m C(m+N,N)(-1)^N Res x^{-N-m-1} Y_WV((1+x)^{wt w+m-1}w,x)u",
        "right_vs_alt" => "w *_N u ≡ w *'_N u",
        "deep_circ_w" => "Res x^{-2N-2-p} Y_W((1+x)^{wt u+N+q}u,x)w ∈ O_N(W), p ≥ q ≥ 0",
        "deep_circ_wv" => "Res x^{-2N-2-p} Y_WV((1+x)^{wt w+N+q}w,x)u ∈ O_N(W), p ≥ q ≥ 0",
        "commutator_y" => "u *_N w - w *_N u ≡ Res Y_W((1+x)^{wt u-1}u,x)w",
        "commutator_ywv" => "w *_N u - u *_N w ≡ Res Y_WV((1+x)^{wt w-1}w,x)u",
        _ => "",
    }
}

/// ρ(𝒴) checks for the Fock intertwiner: target containment, vanishing on the
/// generators of O_N(W₁), both module-map identities, and the L(-1)-derivative property.
pub fn rho_checks(lambda: &Scalar, mu: &Scalar, n: u32, seed: u64, count: usize, depth: u32) -> Vec<Entry> {
    let it = FockIntertwiner::new(lambda.clone(), mu.clone());
    let inst = format!("Y[{},{}]", scalar_to_string(lambda), scalar_to_string(mu));
    let (w1m, w2m) = it.source();
    let (w1m, w2m) = (w1m.clone(), w2m.clone());
    let vm = Voa::heisenberg().module;
    let mut s = Sampler::derived(seed, &format!("rho/{inst}/{n}"));
    let samples: Vec<_> = (0..count)
        .map(|_| (s.basis(&vm, 0, depth), s.basis(&w1m, 0, depth), s.basis(&w2m, 0, n), s.basis(&vm, 1, depth)))
        .collect();
    let mut out: Vec<Entry> = samples
        .par_iter()
        .flat_map_iter(|(u, w1, w2, g)| {
            let inputs = vec![u.to_string(), w1.to_string(), w2.to_string()];
            let image = intertwiner::rho(&it, n, &gv(w1), &gv(w2)).expect("within truncation");
            let contained = image.max_depth().map_or(true, |d| d <= n);
            let gen = bimodule::circ_w(&w1m, n, &gv(g), &gv(w1)).expect("integer weights");
            let vanish = intertwiner::rho(&it, n, &gen, &gv(w2)).expect("within truncation").is_zero();
            let hom = intertwiner::check_rho_hom(&it, n, Convention::CircOnly, &[(u.clone(), w1.clone(), w2.clone())])
                .expect("within truncation");
            let mut v = vec![
                Entry::new("intertwiner", "rho_image", "ρ(w₁⊗w₂) ∈ Ω⁰_N(W₃)", &inst, Some(n), inputs.clone()).exact(contained),
                Entry::new("intertwiner", "rho_vanishes", "ρ(u ∘_N w₁ ⊗ w₂) = 0", &inst, Some(n), vec![g.to_string(), w1.to_string(), w2.to_string()])
                    .exact(vanish),
            ];
            for c in hom {
                let anchor = if c.check_id == "rho_left" {
                    "ρ(u *_N w₁ ⊗ w₂) = o(u) ρ(w₁ ⊗ w₂)"
                } else {
                    "ρ(w₁ *'_N u ⊗ w₂) = ρ(w₁ ⊗ o(u) w₂)"
                };
                v.push(Entry::new("intertwiner", &c.check_id, anchor, &inst, Some(n), inputs.clone()).exact(c.passed));
            }
            v
        })
        .collect();
    let top = -(lambda * mu) - int(1);
    let mut lm1 = Vec::new();
    for (_, w1, w2, _) in samples.iter().take(4) {
        for j in 0..3 {
            lm1.push((w1.clone(), &top + int(w1.depth() as i64 + w2.depth() as i64 - j), 0, w2.clone()));
        }
    }
    for c in intertwiner::check_l_minus1_derivative(&it, &lm1).expect("within truncation") {
        out.push(Entry::new("intertwiner", &c.check_id, "𝒴_{n;k}(L(-1)w) = -n𝒴_{n-1;k}(w) + (k+1)𝒴_{n-1;k+1}(w)", &inst, None, c.inputs).exact(c.passed));
    }
    out
}

/// Fusion bounds at N = 0 for ν ∈ {λ+μ, λ+μ±1}: 1 exactly at λ+μ, stable across windows.
pub fn fusion_checks(lambda: &Scalar, mu: &Scalar, windows: &[u32]) -> Result<Vec<Entry>> {
    let voa = Voa::heisenberg();
    let mut out = Vec::new();
    for shift in [0i64, 1, -1] {
        let nu = lambda + mu + int(shift);
        let r = intertwiner::fusion_dim(
            &voa,
            &Module::heisenberg_fock(lambda.clone()),
            &Module::heisenberg_fock(mu.clone()),
            &Module::heisenberg_fock(nu.clone()),
            0,
            windows,
            Convention::CircOnly,
        )?;
        let want = usize::from(shift == 0);
        let dims: Vec<String> = r.windows.iter().map(|w| format!("D={}:{}", w.window, w.dim)).collect();
        let inst = format!("F[{}]xF[{}]->F[{}]", scalar_to_string(lambda), scalar_to_string(mu), scalar_to_string(&nu));
        out.push(
            Entry::new("fusion", "fusion_dim", "dim Hom_{A_N(V)}(A_N(W₁) ⊗ Ω⁰_N(W₂), Ω⁰_N(W₃))", &inst, Some(0), dims)
                .exact(r.stabilized && r.fusion_dim_upper == want),
        );
    }
    Ok(out)
}

type Group<'a> = Box<dyn Fn() -> Vec<Entry> + Send + Sync + 'a>;

pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    let algebras: Vec<Voa> = config.algebras.iter().map(|a| Voa::parse(a)).collect::<Result<_>>()?;
    let modules: Vec<Arc<Module>> = config.modules.iter().map(|m| Module::parse(m)).collect::<Result<_>>()?;
    let pairs: Vec<(Scalar, Scalar)> = config
        .fock_pairs
        .iter()
        .map(|(a, b)| Ok((parse_scalar(a)?, parse_scalar(b)?)))
        .collect::<Result<_>>()?;
    let zhu_caches: Vec<ZhuCache> = algebras.iter().map(ZhuCache::new).collect();
    let bim_caches: Vec<BimoduleCache> = modules
        .iter()
        .map(|m| BimoduleCache::new(&algebra_of(m), m.clone(), Convention::WeightShift))
        .collect::<Result<_>>()?;
    let (seed, count, depth, policy) = (config.seed, config.samples, config.sample_depth, config.policy());

    let mut groups: Vec<Group> = vec![Box::new(|| formal_checks(config.identity_max_n))];
    for voa in &algebras {
        groups.push(Box::new(move || voa_checks(voa, &voa.module, seed, count, depth)));
    }
    for m in &modules {
        groups.push(Box::new(move || voa_checks(&algebra_of(m), m, seed, count, depth)));
    }
    for &n in &config.n_range {
        for cache in &zhu_caches {
            groups.push(Box::new(move || zhu_checks(cache, n, seed, count, depth, policy)));
        }
        for m in &modules {
            groups.push(Box::new(move || omega_checks(m, n, seed, count, depth)));
        }
        for cache in &bim_caches {
            groups.push(Box::new(move || bimodule_checks(cache, n, seed, count, depth, policy)));
        }
        for (l, mu) in &pairs {
            groups.push(Box::new(move || rho_checks(l, mu, n, seed, count, depth)));
        }
    }
    let mut entries: Vec<Entry> = groups.par_iter().flat_map_iter(|g| g()).collect();
    if config.n_range.contains(&0) {
        for (l, mu) in &pairs {
            entries.extend(fusion_checks(l, mu, &config.fusion_windows)?);
        }
    }
    Ok(Report::from_entries(config.clone(), entries))
}

/// ρ((L(-1)+L(0)_s)|λ⟩ ⊗ |μ⟩) at N = 0. This is (h₃ - h₂)|λ+μ⟩, so the L(-1) family is not
/// in the kernel of ρ unless λ(λ+2μ) = 0.
pub fn shift_family_rho_defect(lambda: &Scalar, mu: &Scalar) -> Result<GradedVector> {
    let it = FockIntertwiner::new(lambda.clone(), mu.clone());
    let (w1m, _) = it.source();
    let g = weight_shift(w1m, &GradedVector::lowest());
    intertwiner::rho(&it, 0, &g, &GradedVector::lowest())
}
