//! Modules for the rank-one Heisenberg and the Virasoro vertex operator algebras.
//!
//! Each module is presented by how a single generator mode acts on its normal-ordered
//! basis: the α(m) ladder on a Fock space, or PBW commutation with central term
//! (m³-m)c/12 on a Virasoro vacuum or Verma module. Modes of composite vectors come from
//! the iterate formula
//!
//!   (g_{(m)}v)_{(n)} = Σ_{i≥0} (-1)^i C(m,i) (g_{(m-i)} v_{(n+i)} - (-1)^m v_{(m+n-i)} g_{(i)}),
//!
//! peeling the leftmost generator off a basis monomial of V. Both sums are finite by
//! lower truncation. Results are memoized in concurrent maps; a computation never
//! holds a map guard while recursing.

use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal::{binom_i, factorial, frac, int, parse_scalar, scalar_to_string, sign, Scalar};
use crate::vector::{BasisVector, GradedVector, Generator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleKind {
    HeisenbergFock { lambda: Scalar },
    VirasoroVacuum { c: Scalar },
    VirasoroVerma { c: Scalar, h: Scalar },
}

/// JSON module descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDescriptor {
    pub module_id: String,
    pub kind: String,
    pub params: BTreeMap<String, String>,
    pub depth_max: u32,
}

type ModeKey = (BasisVector, i64, BasisVector);

pub struct Module {
    id: String,
    kind: ModuleKind,
    gen_cache: DashMap<(i64, BasisVector), GradedVector>,
    mode_cache: DashMap<ModeKey, GradedVector>,
}

impl std::fmt::Debug for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Module({})", self.id)
    }
}

impl Module {
    fn build(id: String, kind: ModuleKind) -> Arc<Module> {
        Arc::new(Module { id, kind, gen_cache: DashMap::new(), mode_cache: DashMap::new() })
    }

    pub fn heisenberg_fock(lambda: Scalar) -> Arc<Module> {
        Self::build(format!("fock:{}", scalar_to_string(&lambda)), ModuleKind::HeisenbergFock { lambda })
    }

    pub fn virasoro_vacuum(c: Scalar) -> Arc<Module> {
        Self::build(format!("virasoro:c={}", scalar_to_string(&c)), ModuleKind::VirasoroVacuum { c })
    }

    pub fn virasoro_verma(c: Scalar, h: Scalar) -> Arc<Module> {
        let id = format!("verma:c={},h={}", scalar_to_string(&c), scalar_to_string(&h));
        Self::build(id, ModuleKind::VirasoroVerma { c, h })
    }

    /// Parses the ids this type prints: `fock:<λ>`, `virasoro:c=<c>`, `verma:c=<c>,h=<h>`;
    /// `heisenberg` is the Fock module of momentum 0.
    pub fn parse(s: &str) -> Result<Arc<Module>> {
        if s == "heisenberg" {
            return Ok(Self::heisenberg_fock(Scalar::zero()));
        }
        if let Some(l) = s.strip_prefix("fock:") {
            return Ok(Self::heisenberg_fock(parse_scalar(l)?));
        }
        if let Some(c) = s.strip_prefix("virasoro:c=") {
            return Ok(Self::virasoro_vacuum(parse_scalar(c)?));
        }
        if let Some((c, h)) = s.strip_prefix("verma:c=").and_then(|r| r.split_once(",h=")) {
            return Ok(Self::virasoro_verma(parse_scalar(c)?, parse_scalar(h)?));
        }
        Err(Error::Invalid(format!("unknown module {s:?}")))
    }

    pub fn from_descriptor(d: &ModuleDescriptor) -> Result<Arc<Module>> {
        let get = |k: &str| -> Result<Scalar> {
            let s = d.params.get(k).ok_or_else(|| Error::Invalid(format!("descriptor lacks param {k}")))?;
            Ok(parse_scalar(s)?)
        };
        match d.kind.as_str() {
            "heisenberg_fock" => Ok(Self::heisenberg_fock(get("lambda")?)),
            "virasoro_vacuum" => Ok(Self::virasoro_vacuum(get("c")?)),
            "virasoro_verma" => Ok(Self::virasoro_verma(get("c")?, get("h")?)),
            other => Err(Error::Invalid(format!("unknown module kind {other}"))),
        }
    }

    pub fn descriptor(&self, depth_max: u32) -> ModuleDescriptor {
        let mut params = BTreeMap::new();
        let kind = match &self.kind {
            ModuleKind::HeisenbergFock { lambda } => {
                params.insert("lambda".into(), scalar_to_string(lambda));
                "heisenberg_fock"
            }
            ModuleKind::VirasoroVacuum { c } => {
                params.insert("c".into(), scalar_to_string(c));
                "virasoro_vacuum"
            }
            ModuleKind::VirasoroVerma { c, h } => {
                params.insert("c".into(), scalar_to_string(c));
                params.insert("h".into(), scalar_to_string(h));
                "virasoro_verma"
            }
        };
        ModuleDescriptor { module_id: self.id.clone(), kind: kind.into(), params, depth_max }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &ModuleKind {
        &self.kind
    }

    pub fn generator(&self) -> Generator {
        match self.kind {
            ModuleKind::HeisenbergFock { .. } => Generator::Alpha,
            _ => Generator::L,
        }
    }

    pub fn central_charge(&self) -> Scalar {
        match &self.kind {
            ModuleKind::HeisenbergFock { .. } => Scalar::one(),
            ModuleKind::VirasoroVacuum { c } | ModuleKind::VirasoroVerma { c, .. } => c.clone(),
        }
    }

    pub fn lowest_weight(&self) -> Scalar {
        match &self.kind {
            ModuleKind::HeisenbergFock { lambda } => lambda * lambda / int(2),
            ModuleKind::VirasoroVacuum { .. } => Scalar::zero(),
            ModuleKind::VirasoroVerma { h, .. } => h.clone(),
        }
    }

    pub fn momentum(&self) -> Option<&Scalar> {
        match &self.kind {
            ModuleKind::HeisenbergFock { lambda } => Some(lambda),
            _ => None,
        }
    }

    fn min_part(&self) -> u32 {
        match self.kind {
            ModuleKind::VirasoroVacuum { .. } => 2,
            _ => 1,
        }
    }

    pub fn weight(&self, b: &BasisVector) -> Scalar {
        self.lowest_weight() + int(b.depth() as i64)
    }

    /// Canonical basis of the depth-d space.
    pub fn basis_at_depth(&self, d: u32) -> Vec<BasisVector> {
        let g = self.generator();
        let mut out = Vec::new();
        partitions(d, d, self.min_part(), &mut Vec::new(), &mut out);
        let mut v: Vec<BasisVector> = out.into_iter().map(|p| BasisVector::of(g, &p)).collect();
        v.sort();
        v
    }

    pub fn basis_up_to(&self, depth: u32) -> Vec<BasisVector> {
        (0..=depth).flat_map(|d| self.basis_at_depth(d)).collect()
    }

    pub fn dims_by_depth(&self, depth: u32) -> Vec<usize> {
        (0..=depth).map(|d| self.basis_at_depth(d).len()).collect()
    }

    /// L(0)_n, identically zero on every shipped module.
    pub fn l0_nilpotent(&self, _w: &GradedVector) -> GradedVector {
        GradedVector::zero()
    }

    /// L(0)_s: multiplies each basis vector by its weight.
    pub fn l0_semisimple(&self, w: &GradedVector) -> GradedVector {
        w.terms().map(|(b, c)| (b.clone(), c * self.weight(b))).collect()
    }

    /// The generator's own mode with its conventional index: α(m) or L(m).
    pub fn field_mode(&self, m: i64, b: &BasisVector) -> GradedVector {
        match &self.kind {
            ModuleKind::HeisenbergFock { lambda } => alpha_mode(lambda, m, b),
            _ => self.virasoro_mode_basis(m, b),
        }
    }

    pub fn field_mode_vec(&self, m: i64, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (b, c) in v.terms() {
            out.add_scaled(&self.field_mode(m, b), c);
        }
        out
    }

    /// g_{(j)} in vertex-algebra indexing.
    fn gen_index_mode(&self, g: Generator, j: i64, b: &BasisVector) -> GradedVector {
        debug_assert_eq!(g, self.generator());
        match g {
            Generator::Alpha => self.field_mode(j, b),
            Generator::L => self.field_mode(j - 1, b),
        }
    }

    fn gen_index_mode_vec(&self, g: Generator, j: i64, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (b, c) in v.terms() {
            out.add_scaled(&self.gen_index_mode(g, j, b), c);
        }
        out
    }

    fn virasoro_mode_basis(&self, m: i64, b: &BasisVector) -> GradedVector {
        let (c, h, vacuum) = match &self.kind {
            ModuleKind::VirasoroVacuum { c } => (c, Scalar::zero(), true),
            ModuleKind::VirasoroVerma { c, h } => (c, h.clone(), false),
            ModuleKind::HeisenbergFock { .. } => unreachable!("L(m) is not a base rule on a Fock module"),
        };
        let Some((_, k1)) = b.first() else {
            return match m {
                m if m > 0 => GradedVector::zero(),
                0 => GradedVector::term(b.clone(), h),
                -1 if vacuum => GradedVector::zero(),
                _ => GradedVector::basis(BasisVector::of(Generator::L, &[(-m) as u32])),
            };
        };
        let k1 = k1 as i64;
        if m < 0 && -m >= k1 {
            return GradedVector::basis(b.prepend_unchecked(Generator::L, (-m) as u32));
        }
        let key = (m, b.clone());
        if let Some(hit) = self.gen_cache.get(&key) {
            return hit.clone();
        }
        // L(m)L(-k1)r = L(-k1)L(m)r + (m+k1)L(m-k1)r + δ_{m,k1} c(m³-m)/12 r
        let rest = b.rest();
        let inner = self.virasoro_mode_basis(m, &rest);
        let mut out = GradedVector::zero();
        for (t, x) in inner.terms() {
            out.add_scaled(&self.virasoro_mode_basis(-k1, t), x);
        }
        out.add_scaled(&self.virasoro_mode_basis(m - k1, &rest), &int(m + k1));
        if m == k1 {
            out.add_term(rest, c * int(m * m * m - m) / int(12));
        }
        self.gen_cache.insert(key, out.clone());
        out
    }

    /// (Y_W)_n(u) w for basis vectors u ∈ V and w ∈ W.
    pub fn mode_basis(&self, u: &BasisVector, n: i64, w: &BasisVector) -> GradedVector {
        let wt_u = u.depth() as i64;
        let dw = w.depth() as i64;
        if n > wt_u - 1 + dw {
            return GradedVector::zero();
        }
        let Some((g, k)) = u.first() else {
            return if n == -1 { GradedVector::basis(w.clone()) } else { GradedVector::zero() };
        };
        let key = (u.clone(), n, w.clone());
        if let Some(hit) = self.mode_cache.get(&key) {
            return hit.clone();
        }
        let rest = u.rest();
        let m = g.creation_index(k);
        let wt_rest = rest.depth() as i64;
        let mut out = GradedVector::zero();
        for i in 0..=(wt_rest - 1 + dw - n).max(-1) {
            let c = sign(i) * binom_i(m, i);
            if c.is_zero() {
                continue;
            }
            let inner = self.mode_basis(&rest, n + i, w);
            if !inner.is_zero() {
                out.add_scaled(&self.gen_index_mode_vec(g, m - i, &inner), &c);
            }
        }
        for i in 0..=(g.weight() - 1 + dw) {
            let c = -sign(m) * sign(i) * binom_i(m, i);
            if c.is_zero() {
                continue;
            }
            let gw = self.gen_index_mode(g, i, w);
            for (b, x) in gw.terms() {
                out.add_scaled(&self.mode_basis(&rest, m + n - i, b), &(&c * x));
            }
        }
        debug_assert!(out.terms().all(|(b, _)| b.depth() as i64 == wt_u - n - 1 + dw), "weight bookkeeping");
        self.mode_cache.insert(key, out.clone());
        out
    }

    fn check_generators(&self, u: &GradedVector) -> Result<()> {
        let mine = self.generator();
        for (b, _) in u.terms() {
            if let Some(g) = b.generators().find(|&g| g != mine) {
                return Err(Error::UnknownGenerator { generator: g.symbol().into(), module: self.id.clone() });
            }
        }
        Ok(())
    }

    /// (Y_W)_n(u) w extended bilinearly.
    pub fn mode_action(&self, u: &GradedVector, n: i64, w: &GradedVector) -> Result<GradedVector> {
        self.check_generators(u)?;
        self.check_generators(w)?;
        Ok(self.mode(u, n, w))
    }

    /// Unchecked bilinear mode action for callers that already validated generators.
    pub fn mode(&self, u: &GradedVector, n: i64, w: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (a, x) in u.terms() {
            for (b, y) in w.terms() {
                out.add_scaled(&self.mode_basis(a, n, b), &(x * y));
            }
        }
        out
    }

    /// Virasoro mode L(m) on the module, via ω.
    pub fn virasoro(&self, m: i64, w: &GradedVector) -> GradedVector {
        match self.kind {
            ModuleKind::HeisenbergFock { .. } => self.mode(&omega_for(Generator::Alpha), m + 1, w),
            _ => self.field_mode_vec(m, w),
        }
    }

    pub fn l_minus1(&self, w: &GradedVector) -> GradedVector {
        self.virasoro(-1, w)
    }

    pub fn cache_sizes(&self) -> (usize, usize) {
        (self.gen_cache.len(), self.mode_cache.len())
    }
}

fn alpha_mode(lambda: &Scalar, m: i64, b: &BasisVector) -> GradedVector {
    use std::cmp::Ordering::*;
    match m.cmp(&0) {
        Less => GradedVector::basis(BasisVector::new(
            b.modes().iter().copied().chain(std::iter::once((Generator::Alpha, (-m) as u32))).collect(),
        )),
        Equal => GradedVector::term(b.clone(), lambda.clone()),
        Greater => {
            let mult = b.multiplicity(Generator::Alpha, m as u32);
            if mult == 0 {
                GradedVector::zero()
            } else {
                GradedVector::term(b.without_one(Generator::Alpha, m as u32), int(m * mult as i64))
            }
        }
    }
}

fn partitions(n: u32, max: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 0 {
        out.push(cur.clone());
        return;
    }
    let mut k = max.min(n);
    while k >= min {
        cur.push(k);
        partitions(n - k, k, min, cur, out);
        cur.pop();
        k -= 1;
    }
}

fn omega_for(g: Generator) -> GradedVector {
    match g {
        Generator::Alpha => GradedVector::term(BasisVector::of(Generator::Alpha, &[1, 1]), frac(1, 2)),
        Generator::L => GradedVector::basis(BasisVector::of(Generator::L, &[2])),
    }
}

/// A vertex operator algebra given as a module over itself.
#[derive(Debug, Clone)]
pub struct Voa {
    pub module: Arc<Module>,
}

impl Voa {
    pub fn heisenberg() -> Voa {
        Voa { module: Module::heisenberg_fock(Scalar::zero()) }
    }

    pub fn virasoro(c: Scalar) -> Voa {
        Voa { module: Module::virasoro_vacuum(c) }
    }

    /// Accepts `heisenberg` or `virasoro:c=<rational>`.
    pub fn parse(s: &str) -> Result<Voa> {
        if s == "heisenberg" {
            return Ok(Voa::heisenberg());
        }
        if let Some(c) = s.strip_prefix("virasoro:c=") {
            return Ok(Voa::virasoro(parse_scalar(c)?));
        }
        Err(Error::Invalid(format!("unknown algebra {s:?}")))
    }

    pub fn id(&self) -> String {
        match self.module.kind() {
            ModuleKind::HeisenbergFock { .. } => "heisenberg".into(),
            _ => self.module.id().to_string(),
        }
    }

    pub fn generator(&self) -> Generator {
        self.module.generator()
    }

    pub fn central_charge(&self) -> Scalar {
        self.module.central_charge()
    }

    pub fn vacuum(&self) -> GradedVector {
        GradedVector::lowest()
    }

    pub fn omega(&self) -> GradedVector {
        omega_for(self.generator())
    }

    /// The strong generator as a vector: α(-1)𝟏 or ω.
    pub fn generating_vector(&self) -> GradedVector {
        match self.generator() {
            Generator::Alpha => GradedVector::basis(BasisVector::of(Generator::Alpha, &[1])),
            Generator::L => self.omega(),
        }
    }

    /// Whether W is a module for this algebra.
    pub fn acts_on(&self, w: &Module) -> bool {
        w.generator() == self.generator() && w.central_charge() == self.central_charge()
    }

    pub fn basis_up_to(&self, depth: u32) -> Vec<BasisVector> {
        self.module.basis_up_to(depth)
    }
}

/// (Y^o_W)_n(v) w from Y^o(v,x) = Y(e^{xL(1)}(-x^{-2})^{L(0)}v, x^{-1}):
/// for v of weight k this is Σ_j (-1)^k/j! Y_{2k-j-n-2}(L(1)^j v).
pub fn opposite_mode(voa: &Voa, w_mod: &Module, v: &GradedVector, n: i64, w: &GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    for (k, vk) in v.components() {
        let k = k as i64;
        let mut lj = vk.clone();
        let mut j = 0i64;
        while !lj.is_zero() {
            let c = sign(k) / factorial(j as u32);
            out.add_scaled(&w_mod.mode(&lj, 2 * k - j - n - 2, w), &c);
            lj = voa.module.virasoro(1, &lj);
            j += 1;
        }
    }
    out
}

/// Y_{WV}^W(w,x)u = e^{xL(-1)} Y_W(u,-x) w; its x^{-n-1} coefficient is
/// Σ_{j≥0} (-1)^{n+j+1}/j! L(-1)^j Y_{n+j}(u) w.
pub fn ywv_mode(w_mod: &Module, w: &GradedVector, n: i64, u: &GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    let (Some(du), Some(dw)) = (u.max_depth(), w.max_depth()) else {
        return out;
    };
    let top = du as i64 + dw as i64 - 1;
    for j in 0..=(top - n).max(-1) {
        let mut term = w_mod.mode(u, n + j, w);
        for _ in 0..j {
            term = w_mod.l_minus1(&term);
        }
        out.add_scaled(&term, &(sign(n + j + 1) / factorial(j as u32)));
    }
    out
}

/// A vector tagged with formal powers y^e of a marker, keyed by the exponent.
pub type Marked = BTreeMap<Scalar, GradedVector>;

/// y^{±L(0)_s} applied to w: each depth-d piece picks up y^{±(h+d)}.
pub fn l0s_conjugate(w_mod: &Module, w: &GradedVector, inverse: bool) -> Marked {
    let mut out = Marked::new();
    for (d, piece) in w.components() {
        let e = w_mod.lowest_weight() + int(d as i64);
        out.insert(if inverse { -e } else { e }, piece);
    }
    out
}

/// Applies y^{L(0)_s} Y_n(u) y^{-L(0)_s} to w, returning the marked result.
pub fn conjugated_mode(w_mod: &Module, u: &BasisVector, n: i64, w: &GradedVector) -> Marked {
    let mut out = Marked::new();
    for (e, piece) in l0s_conjugate(w_mod, w, true) {
        let moved = w_mod.mode(&GradedVector::basis(u.clone()), n, &piece);
        for (e2, p2) in l0s_conjugate(w_mod, &moved, false) {
            out.entry(&e + e2).or_default().add_assign(&p2);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// The graded-dual operator (Y'_W)_n(v) as a matrix on the window, obtained by transposing
/// Y^o_n(v) between whole weight spaces, then paired against w. Compares with ⟨w', Y^o_n(v)w⟩.
pub fn contragredient_pairing_check(
    voa: &Voa,
    w_mod: &Module,
    v: &GradedVector,
    n: i64,
    w_dual: &GradedVector,
    w: &GradedVector,
) -> bool {
    let pair = |f: &GradedVector, x: &GradedVector| -> Scalar {
        f.terms().map(|(b, c)| c * x.coeff(b)).fold(Scalar::zero(), |a, b| a + b)
    };
    let rhs = pair(w_dual, &opposite_mode(voa, w_mod, v, n, w));
    let lhs = contragredient_mode(voa, w_mod, v, n, w_dual);
    pair(&lhs, w) == rhs
}

/// (Y'_W)_n(v) w' as a functional, via the transposed matrix of Y^o_n(v).
pub fn contragredient_mode(voa: &Voa, w_mod: &Module, v: &GradedVector, n: i64, w_dual: &GradedVector) -> GradedVector {
    let mut out = GradedVector::zero();
    for (k, vk) in v.components() {
        // Y^o_n(v_k) raises depth by n+1-k, so Y' lowers the dual's depth by that amount.
        for (d, f) in w_dual.components() {
            let target = d as i64 - (n + 1 - k as i64);
            if target < 0 {
                continue;
            }
            for b in w_mod.basis_at_depth(target as u32) {
                let image = opposite_mode(voa, w_mod, &vk, n, &GradedVector::basis(b.clone()));
                let val = f.terms().map(|(fb, c)| c * image.coeff(fb)).fold(Scalar::zero(), |a, b| a + b);
                out.add_term(b, val);
            }
        }
    }
    out
}

/// [Y_m(u), Y_n(v)] w against Σ_{j≥0} C(m,j) Y_{m+n-j}(Y_j(u)v) w.
pub fn commutator_check(voa: &Voa, w_mod: &Module, u: &GradedVector, m: i64, v: &GradedVector, n: i64, w: &GradedVector) -> bool {
    let lhs = w_mod.mode(u, m, &w_mod.mode(v, n, w)).minus(&w_mod.mode(v, n, &w_mod.mode(u, m, w)));
    let mut rhs = GradedVector::zero();
    let (Some(du), Some(dv)) = (u.max_depth(), v.max_depth()) else {
        return lhs.is_zero();
    };
    for j in 0..=(du as i64 + dv as i64) {
        let c = binom_i(m, j);
        if c.is_zero() {
            continue;
        }
        let uv = voa.module.mode(u, j, v);
        if !uv.is_zero() {
            rhs.add_scaled(&w_mod.mode(&uv, m + n - j, w), &c);
        }
    }
    lhs == rhs
}
