//! The cup subalgebra: the orthonormal family E_b attached to a unit 1-box,
//! the expansion identities for the cup action on it, the matrix model
//! α + (s+s*)⊗1 under the index map η_b, coarse-correspondence inner-product
//! identities for V, the E₁⊕E₂⊕E₃ decomposition, and the tower product ∧_k
//! with its inclusion maps.

use alloc::format;
use alloc::string::String;

use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::ncpoly::{times_j, vn_basis, z_vector, Context, GrElement, NcError, Word};
use crate::scalars::{FieldScalar, Rational};
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CupError {
    /// E_b needs a unit vector in P₁.
    NotUnitOneBox,
    /// The cup machinery needs δ > 1 (so that δ−δ⁻¹ > 0).
    DeltaTooSmall,
    /// Input is not in V (a cap does not vanish).
    NotInV,
    /// Tower elements with different through-strand counts.
    ThroughCountMismatch,
    /// Word too short to carry the requested through-strands.
    BadSegmentation,
    /// Re-expression of a cup action in the E_b family left a residual;
    /// this signals an engine or convention bug.
    ResidualNonzero(String),
    Nc(NcError),
}

impl From<NcError> for CupError {
    fn from(e: NcError) -> Self {
        CupError::Nc(e)
    }
}

impl core::fmt::Display for CupError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CupError::NotUnitOneBox => write!(f, "E_b requires a unit vector of degree 1"),
            CupError::DeltaTooSmall => write!(f, "cup machinery requires delta > 1"),
            CupError::NotInV => write!(f, "element is not in V (caps do not vanish)"),
            CupError::ThroughCountMismatch => write!(f, "through-strand counts differ"),
            CupError::BadSegmentation => write!(f, "word shorter than its through-strands"),
            CupError::ResidualNonzero(w) => write!(f, "expansion residual nonzero: {}", w),
            CupError::Nc(e) => write!(f, "{}", e),
        }
    }
}

/// Outcome of an exact verification with an optional failure witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn pass() -> Self {
        CheckOutcome {
            pass: true,
            witness: None,
        }
    }

    pub fn fail(witness: String) -> Self {
        CheckOutcome {
            pass: false,
            witness: Some(witness),
        }
    }
}

// ---------------------------------------------------------------------------
// The E_b family
// ---------------------------------------------------------------------------

/// Index of an E_b basis vector. Under η_b, `BCup(r) ↦ e₀⊗e_r` and
/// `ZCup(k, r) ↦ e_{k+1}⊗e_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EbKind {
    /// b•∪^{•r}
    BCup(usize),
    /// ∪^{•k}•Z_b•∪^{•r}
    ZCup(usize, usize),
}

impl EbKind {
    pub fn degree(&self) -> usize {
        match *self {
            EbKind::BCup(r) => 1 + 2 * r,
            EbKind::ZCup(k, r) => 3 + 2 * (k + r),
        }
    }

    /// Grid position (k, r) of the image basis vector e_k⊗e_r.
    pub fn eta_index(&self) -> (usize, usize) {
        match *self {
            EbKind::BCup(r) => (0, r),
            EbKind::ZCup(k, r) => (k + 1, r),
        }
    }

    pub fn from_eta_index(k: usize, r: usize) -> Self {
        if k == 0 {
            EbKind::BCup(r)
        } else {
            EbKind::ZCup(k - 1, r)
        }
    }

    /// All kinds of the given total degree (odd degrees only).
    pub fn of_degree(degree: usize) -> Vec<EbKind> {
        let mut out = Vec::new();
        if degree % 2 == 1 {
            out.push(EbKind::BCup((degree - 1) / 2));
            if degree >= 3 {
                let s = (degree - 3) / 2;
                for k in 0..=s {
                    out.push(EbKind::ZCup(k, s - k));
                }
            }
        }
        out
    }
}

impl core::fmt::Display for EbKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            EbKind::BCup(r) => write!(f, "b·cup^{}", r),
            EbKind::ZCup(k, r) => write!(f, "cup^{}·Z·cup^{}", k, r),
        }
    }
}

/// An E_b basis vector: the unnormalized element (b•∪^{•r} or the Z̃-form
/// ∪^{•k}•Z̃_b•∪^{•r}) with its exact squared norm.
#[derive(Debug, Clone)]
pub struct EbVector {
    pub kind: EbKind,
    pub element: GrElement,
    pub norm_sq: FieldScalar,
}

/// The E_b machinery for a fixed unit b ∈ P₁. Family vectors are memoized,
/// so the struct is cheap to query but not `Sync`.
#[derive(Debug)]
pub struct EbFamily {
    ctx: Context,
    b: GrElement,
    z_tilde: GrElement,
    cache: core::cell::RefCell<alloc::collections::BTreeMap<EbKind, EbVector>>,
}

impl EbFamily {
    pub fn new(b: &GrElement) -> Result<Self, CupError> {
        if b.homogeneous_degree() != Some(1) || !b.norm_sq().is_one() {
            return Err(CupError::NotUnitOneBox);
        }
        let ctx = b.ctx().clone();
        if ctx.scalars().delta() <= &Rational::one() {
            return Err(CupError::DeltaTooSmall);
        }
        let (z_tilde, _) = z_vector(b)?;
        Ok(EbFamily {
            ctx,
            b: b.clone(),
            z_tilde,
            cache: core::cell::RefCell::new(alloc::collections::BTreeMap::new()),
        })
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn b(&self) -> &GrElement {
        &self.b
    }

    pub fn vector(&self, kind: EbKind) -> EbVector {
        if let Some(v) = self.cache.borrow().get(&kind) {
            return v.clone();
        }
        let element = match kind {
            EbKind::BCup(r) => self.b.bullet(&GrElement::cup_pow(&self.ctx, r as i64)),
            EbKind::ZCup(k, r) => GrElement::cup_pow(&self.ctx, k as i64)
                .bullet(&self.z_tilde)
                .bullet(&GrElement::cup_pow(&self.ctx, r as i64)),
        };
        let norm_sq = element.norm_sq();
        let v = EbVector {
            kind,
            element,
            norm_sq,
        };
        self.cache.borrow_mut().insert(kind, v.clone());
        v
    }

    /// Exact square root of the squared norm: δ^{r/2} for BCup(r) and
    /// δ^{(k+r)/2}·√(δ−δ⁻¹) for ZCup(k, r). `normalized` checks that this
    /// really is the computed norm.
    pub fn sqrt_norm(&self, kind: EbKind) -> FieldScalar {
        let sc = self.ctx.scalars();
        match kind {
            EbKind::BCup(r) => FieldScalar::sqrt_delta_pow(sc, r as i64),
            EbKind::ZCup(k, r) => {
                &FieldScalar::sqrt_delta_pow(sc, (k + r) as i64)
                    * &FieldScalar::sqrt_delta_minus_inv(sc)
            }
        }
    }

    /// The unit vector of the family: element / √(norm²), exact.
    pub fn normalized(&self, kind: EbKind) -> GrElement {
        let v = self.vector(kind);
        let s = self.sqrt_norm(kind);
        assert_eq!(
            &s * &s,
            v.norm_sq,
            "norm formula disagrees with the exact inner product"
        );
        &v.element * &s.inv().expect("norms are nonzero")
    }

    /// All basis vectors of total degree ≤ degree_cap, BCup first, then
    /// ZCup ordered by (k, r).
    pub fn basis(&self, degree_cap: usize) -> Vec<EbVector> {
        let mut kinds = Vec::new();
        let mut r = 0;
        while 2 * r < degree_cap {
            kinds.push(EbKind::BCup(r));
            r += 1;
        }
        let mut k = 0;
        while 3 + 2 * k <= degree_cap {
            let mut r = 0;
            while 3 + 2 * (k + r) <= degree_cap {
                kinds.push(EbKind::ZCup(k, r));
                r += 1;
            }
            k += 1;
        }
        kinds.into_iter().map(|k| self.vector(k)).collect()
    }

    /// Expands ∪⋆x (or x⋆∪) exactly in the E_b family and returns the
    /// coefficient record on unnormalized family vectors. A nonzero residual
    /// is an error: the family is invariant under the cup action, so failure
    /// to re-express signals an engine or convention bug.
    ///
    /// Coefficients are extracted by cap peeling — ⟨w, x•∪⟩ = ⟨cap_right(w), x⟩
    /// and ⟨w, ∪•x⟩ = ⟨cap_left(w), x⟩ — which shrinks w geometrically, and
    /// the exact zero-residual check certifies the result regardless of how
    /// the coefficients were obtained.
    pub fn cup_action_expand(
        &self,
        side: CupSide,
        kind: EbKind,
    ) -> Result<Vec<(EbKind, FieldScalar)>, CupError> {
        let x = self.vector(kind);
        let cup = GrElement::cup(&self.ctx);
        let w = match side {
            CupSide::Left => cup.star(&x.element),
            CupSide::Right => x.element.star(&cup),
        };
        let sc = self.ctx.scalars();
        let z_norm = &FieldScalar::delta_pow(sc, 1) - &FieldScalar::delta_pow(sc, -1);
        let mut coeffs: Vec<(EbKind, FieldScalar)> = Vec::new();
        let mut residual = w.clone();
        for d in w.degrees() {
            if d % 2 == 0 {
                // no family vector in even degrees: shows up in the residual
                continue;
            }
            let r_b = (d - 1) / 2;
            let z_total = if d >= 3 { Some((d - 3) / 2) } else { None };
            let mut right = w.homogeneous_part(d);
            for r in 0..=r_b {
                if let Some(s) = z_total {
                    if r <= s {
                        let k = s - r;
                        let mut peeled = right.clone();
                        for _ in 0..k {
                            peeled = peeled.cap_left()?;
                        }
                        // ⟨w, ∪^k•Z̃•∪^r⟩ / ‖∪^k•Z̃•∪^r‖², with the norm from
                        // the (independently verified) formula δ^{k+r}(δ−δ⁻¹).
                        let overlap = peeled.inner(&self.z_tilde);
                        if !overlap.is_zero() {
                            let norm = &FieldScalar::delta_pow(sc, (k + r) as i64) * &z_norm;
                            let c = &overlap * &norm.inv().expect("nonzero norm");
                            coeffs.push((EbKind::ZCup(k, r), c));
                        }
                    }
                }
                if r == r_b {
                    let overlap = right.inner(&self.b);
                    if !overlap.is_zero() {
                        let norm = FieldScalar::delta_pow(sc, r_b as i64);
                        let c = &overlap * &norm.inv().expect("nonzero norm");
                        coeffs.push((EbKind::BCup(r_b), c));
                    }
                } else {
                    right = right.cap_right()?;
                }
            }
        }
        for (kind2, c) in &coeffs {
            residual = &residual - &(&self.vector(*kind2).element * c);
        }
        if !residual.is_zero() {
            return Err(CupError::ResidualNonzero(format!(
                "{:?} acting on {} leaves {}",
                side, kind, residual
            )));
        }
        Ok(coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CupSide {
    Left,
    Right,
}

/// The closed-form expansion identities for the cup action on the E_b family,
/// in unnormalized form. `cup_action_expand` must reproduce these exactly.
pub fn predicted_cup_expansion(ctx: &Context, side: CupSide, kind: EbKind) -> Vec<(EbKind, FieldScalar)> {
    let sc = ctx.scalars();
    let one = FieldScalar::one(sc);
    let delta = FieldScalar::delta_pow(sc, 1);
    let delta_inv = FieldScalar::delta_pow(sc, -1);
    let mut out: Vec<(EbKind, FieldScalar)> = Vec::new();
    match (side, kind) {
        (CupSide::Left, EbKind::BCup(r)) => {
            // ∪⋆(b•∪^r) = Z̃•∪^r + δ⁻¹·b•∪^{r+1} + b•∪^r + b•∪^{r−1}
            out.push((EbKind::ZCup(0, r), one.clone()));
            out.push((EbKind::BCup(r + 1), delta_inv));
            out.push((EbKind::BCup(r), one.clone()));
            if r >= 1 {
                out.push((EbKind::BCup(r - 1), one));
            }
        }
        (CupSide::Left, EbKind::ZCup(0, r)) => {
            // ∪⋆(Z̃•∪^r) = ∪•Z̃•∪^r + Z̃•∪^r + (δ−δ⁻¹)·b•∪^r
            out.push((EbKind::ZCup(1, r), one.clone()));
            out.push((EbKind::ZCup(0, r), one));
            out.push((EbKind::BCup(r), &delta - &delta_inv));
        }
        (CupSide::Left, EbKind::ZCup(k, r)) => {
            out.push((EbKind::ZCup(k + 1, r), one.clone()));
            out.push((EbKind::ZCup(k, r), one));
            out.push((EbKind::ZCup(k - 1, r), delta));
        }
        (CupSide::Right, EbKind::BCup(r)) => {
            // (b•∪^r)⋆∪ = b•∪^{r+1} + b•∪^r + δ·b•∪^{r−1}
            out.push((EbKind::BCup(r + 1), one.clone()));
            out.push((EbKind::BCup(r), one));
            if r >= 1 {
                out.push((EbKind::BCup(r - 1), delta));
            }
        }
        (CupSide::Right, EbKind::ZCup(k, r)) => {
            // Z_b vanishes when capped on the right, so no δ-term at r = 0.
            out.push((EbKind::ZCup(k, r + 1), one.clone()));
            out.push((EbKind::ZCup(k, r), one));
            if r >= 1 {
                out.push((EbKind::ZCup(k, r - 1), delta));
            }
        }
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Exact Gram matrix of a list of elements.
pub fn gram(vectors: &[GrElement]) -> Mat<FieldScalar> {
    Mat::from_fn(vectors.len(), vectors.len(), |i, j| {
        vectors[i].inner(&vectors[j])
    })
}

// ---------------------------------------------------------------------------
// The matrix model α + (s+s*)⊗1
// ---------------------------------------------------------------------------

/// Verifies, entry by entry with zero tolerance, that in the normalized E_b
/// basis the left action of (∪−1)/√δ is α + (s+s*)⊗1 and the right action is
/// 1⊗(s+s*), under the index map η_b.
pub fn alpha_model_check(b: &GrElement, k_cap: usize, r_cap: usize) -> Result<CheckOutcome, CupError> {
    let family = EbFamily::new(b)?;
    let ctx = family.ctx().clone();
    let sc = ctx.scalars();
    let sqrt_delta_inv = FieldScalar::sqrt_delta(sc).inv().expect("delta > 0");
    let coupling = &FieldScalar::sqrt_one_minus_inv_sq(sc) - &FieldScalar::one(sc);
    let delta_inv = FieldScalar::delta_pow(sc, -1);

    for k0 in 0..=k_cap {
        for r0 in 0..=r_cap {
            let kind = EbKind::from_eta_index(k0, r0);
            for side in [CupSide::Left, CupSide::Right] {
                // Engine column of π((∪−1)/√δ) resp. ρ(...) on the normalized
                // basis vector, from the exact expansion of the cup action.
                let expansion = family.cup_action_expand(side, kind)?;
                let mut engine: Vec<((usize, usize), FieldScalar)> = Vec::new();
                let sx = family.sqrt_norm(kind);
                let sx_inv = sx.inv().expect("nonzero norm");
                for (k2, c) in &expansion {
                    let mut coeff = c.clone();
                    if k2 == &kind {
                        coeff = &coeff - &FieldScalar::one(sc);
                    }
                    let entry = &(&(&coeff * &family.sqrt_norm(*k2)) * &sx_inv) * &sqrt_delta_inv;
                    if !entry.is_zero() {
                        engine.push((k2.eta_index(), entry));
                    }
                }
                if !expansion.iter().any(|(k2, _)| k2 == &kind) {
                    // the −1 part still contributes when the expansion has no
                    // diagonal term
                    let entry = &(-&FieldScalar::one(sc)) * &sqrt_delta_inv;
                    engine.push((kind.eta_index(), entry));
                }
                engine.sort_by_key(|(i, _)| *i);

                // Model column.
                let mut model: Vec<((usize, usize), FieldScalar)> = Vec::new();
                match side {
                    CupSide::Left => {
                        // (s+s*)⊗1
                        model.push(((k0 + 1, r0), FieldScalar::one(sc)));
                        if k0 >= 1 {
                            model.push(((k0 - 1, r0), FieldScalar::one(sc)));
                        }
                        // α
                        if k0 == 0 {
                            model.push(((1, r0), coupling.clone()));
                            model.push(((0, r0 + 1), delta_inv.clone()));
                            if r0 >= 1 {
                                model.push(((0, r0 - 1), delta_inv.clone()));
                            }
                        } else if k0 == 1 {
                            model.push(((0, r0), coupling.clone()));
                        }
                    }
                    CupSide::Right => {
                        // 1⊗(s+s*)
                        model.push(((k0, r0 + 1), FieldScalar::one(sc)));
                        if r0 >= 1 {
                            model.push(((k0, r0 - 1), FieldScalar::one(sc)));
                        }
                    }
                }
                // Merge duplicate rows and drop zeros.
                model.sort_by_key(|(i, _)| *i);
                let mut merged: Vec<((usize, usize), FieldScalar)> = Vec::new();
                for (i, c) in model {
                    match merged.last_mut() {
                        Some((j, acc)) if *j == i => *acc += &c,
                        _ => merged.push((i, c)),
                    }
                }
                merged.retain(|(_, c)| !c.is_zero());

                if engine != merged {
                    return Ok(CheckOutcome::fail(format!(
                        "{:?} action on e_{}⊗e_{}: engine column {:?} vs model {:?}",
                        side, k0, r0, engine, merged
                    )));
                }
            }
        }
    }
    Ok(CheckOutcome::pass())
}

// ---------------------------------------------------------------------------
// Coarse correspondences over V
// ---------------------------------------------------------------------------

/// Verifies ⟨∪^k•v•∪^r, ∪^{k2}•v2•∪^{r2}⟩ = δ^{k+r}·1{k=k2}·1{r=r2}·⟨v,v2⟩
/// exactly, the inner-product form of the η_V coarse-correspondence map.
pub fn coarse_check_v(
    v: &GrElement,
    v2: &GrElement,
    k: usize,
    r: usize,
    k2: usize,
    r2: usize,
) -> Result<CheckOutcome, CupError> {
    for e in [v, v2] {
        if !e.is_in_v()? {
            return Err(CupError::NotInV);
        }
    }
    let ctx = v.ctx();
    let pad = |x: &GrElement, a: usize, b: usize| {
        GrElement::cup_pow(ctx, a as i64)
            .bullet(x)
            .bullet(&GrElement::cup_pow(ctx, b as i64))
    };
    let lhs = pad(v, k, r).inner(&pad(v2, k2, r2));
    let rhs = if k == k2 && r == r2 {
        &FieldScalar::delta_pow(ctx.scalars(), (k + r) as i64) * &v.inner(v2)
    } else {
        FieldScalar::zero(ctx.scalars())
    };
    if lhs == rhs {
        Ok(CheckOutcome::pass())
    } else {
        Ok(CheckOutcome::fail(format!(
            "(k,r)=({k},{r}) (k2,r2)=({k2},{r2}): lhs {} vs rhs {}",
            lhs, rhs
        )))
    }
}

/// Grid form of the coarse-correspondence check: the identity for every pair
/// from `vs` and every pad combination k, r, k2, r2 ≤ pad_max, with padded
/// elements built once.
pub fn coarse_check_v_grid(vs: &[GrElement], pad_max: usize) -> Result<CheckOutcome, CupError> {
    let Some(first) = vs.first() else {
        return Ok(CheckOutcome::pass());
    };
    let ctx = first.ctx();
    for v in vs {
        if !v.is_in_v()? {
            return Err(CupError::NotInV);
        }
    }
    let cups: Vec<GrElement> = (0..=pad_max)
        .map(|k| GrElement::cup_pow(ctx, k as i64))
        .collect();
    // padded[i][k][r] = ∪^k • v_i • ∪^r
    let padded: Vec<Vec<Vec<GrElement>>> = vs
        .iter()
        .map(|v| {
            (0..=pad_max)
                .map(|k| {
                    let left = cups[k].bullet(v);
                    (0..=pad_max).map(|r| left.bullet(&cups[r])).collect()
                })
                .collect()
        })
        .collect();
    for (i, v) in vs.iter().enumerate() {
        for (i2, v2) in vs.iter().enumerate() {
            let base = v.inner(v2);
            for k in 0..=pad_max {
                for r in 0..=pad_max {
                    for k2 in 0..=pad_max {
                        for r2 in 0..=pad_max {
                            let a = &padded[i][k][r];
                            let c = &padded[i2][k2][r2];
                            // different grades never share words
                            let lhs = if a.homogeneous_degree() == c.homogeneous_degree() {
                                a.inner(c)
                            } else {
                                FieldScalar::zero(ctx.scalars())
                            };
                            let rhs = if k == k2 && r == r2 {
                                &FieldScalar::delta_pow(ctx.scalars(), (k + r) as i64) * &base
                            } else {
                                FieldScalar::zero(ctx.scalars())
                            };
                            if lhs != rhs {
                                return Ok(CheckOutcome::fail(format!(
                                    "vectors ({i},{i2}) pads ({k},{r}) vs ({k2},{r2}): {lhs} vs {rhs}"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CheckOutcome::pass())
}

// ---------------------------------------------------------------------------
// E₁ ⊕ E₂ ⊕ E₃
// ---------------------------------------------------------------------------

/// Dimensions of the intersections of P_n with the three spans: cup powers,
/// ∪^r•b•∪^k over b ∈ P₁, and ∪^r•v•∪^k over v ∈ V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub n: usize,
    pub cup_dim: usize,
    pub onebox_dim: usize,
    pub v_dim: usize,
    pub space_dim: usize,
    pub orthogonal: bool,
}

impl DecompositionReport {
    pub fn pass(&self) -> bool {
        self.orthogonal && self.cup_dim + self.onebox_dim + self.v_dim == self.space_dim
    }
}

/// Exact-rank computation of the E₁⊕E₂⊕E₃ decomposition at degree n.
pub fn e123_decomposition(ctx: &Context, n: usize) -> Result<DecompositionReport, CupError> {
    let l = ctx.letters() as usize;
    let space_dim = l.pow(n as u32);

    let mut e1: Vec<GrElement> = Vec::new();
    if n.is_multiple_of(2) {
        e1.push(GrElement::cup_pow(ctx, (n / 2) as i64));
    }
    let mut e2: Vec<GrElement> = Vec::new();
    if n % 2 == 1 {
        let pad_total = (n - 1) / 2;
        for i in 1..=ctx.letters() {
            let b = GrElement::letter(ctx, i)?;
            for r in 0..=pad_total {
                let k = pad_total - r;
                e2.push(
                    GrElement::cup_pow(ctx, r as i64)
                        .bullet(&b)
                        .bullet(&GrElement::cup_pow(ctx, k as i64)),
                );
            }
        }
    }
    let mut e3: Vec<GrElement> = Vec::new();
    for q in 2..=n {
        if !(n - q).is_multiple_of(2) {
            continue;
        }
        let pad_total = (n - q) / 2;
        let basis = vn_basis(ctx, q)?;
        if basis.is_empty() {
            continue;
        }
        for r in 0..=pad_total {
            let k = pad_total - r;
            for v in &basis {
                e3.push(
                    GrElement::cup_pow(ctx, r as i64)
                        .bullet(v)
                        .bullet(&GrElement::cup_pow(ctx, k as i64)),
                );
            }
        }
    }

    let rank_of = |vectors: &[GrElement]| -> Result<usize, CupError> {
        if vectors.is_empty() {
            return Ok(0);
        }
        let rows = vectors.len();
        let mut m = Mat::filled(rows, space_dim, FieldScalar::zero(ctx.scalars()));
        for (i, v) in vectors.iter().enumerate() {
            for (c, x) in v.coords(n)?.into_iter().enumerate() {
                m.set(i, c, x);
            }
        }
        Ok(m.rank())
    };

    let cup_dim = rank_of(&e1)?;
    let onebox_dim = rank_of(&e2)?;
    let v_dim = rank_of(&e3)?;

    let mut orthogonal = true;
    'ortho: for (fam_a, fam_b) in [(&e1, &e2), (&e1, &e3), (&e2, &e3)] {
        for a in fam_a.iter() {
            for b in fam_b.iter() {
                if !a.inner(b).is_zero() {
                    orthogonal = false;
                    break 'ortho;
                }
            }
        }
    }

    Ok(DecompositionReport {
        n,
        cup_dim,
        onebox_dim,
        v_dim,
        space_dim,
        orthogonal,
    })
}

// ---------------------------------------------------------------------------
// The tower product ∧_k
// ---------------------------------------------------------------------------

/// Reflection flag for the tower conventions. The planar picture pins only the
/// algebraic constraints (∧₀ = ⋆, unitality, the ×-product table on pure
/// through-strands); `Standard` matches through-strands by reversal and
/// passes all of them verbatim, `Reflected` is its planar mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerConvention {
    Standard,
    Reflected,
}

/// Element of Gr_k(P): words segmented as (ℓ | m | r) with |ℓ| = |r| = k
/// through-strands on each side. The segmentation is positional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerElement {
    k: usize,
    element: GrElement,
}

impl TowerElement {
    pub fn new(k: usize, element: GrElement) -> Result<Self, CupError> {
        if element.terms().any(|(w, _)| w.degree() < 2 * k) {
            return Err(CupError::BadSegmentation);
        }
        Ok(TowerElement { k, element })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn element(&self) -> &GrElement {
        &self.element
    }

    pub fn is_zero(&self) -> bool {
        self.element.is_zero()
    }

    pub fn involution(&self) -> TowerElement {
        TowerElement {
            k: self.k,
            element: self.element.involution(),
        }
    }

    pub fn inner(&self, other: &TowerElement) -> FieldScalar {
        self.element.inner(&other.element)
    }
}

fn segment(w: &Word, k: usize) -> (&[u8], &[u8], &[u8]) {
    let ls = w.letters();
    let n = ls.len();
    (&ls[..k], &ls[k..n - k], &ls[n - k..])
}

/// The tower multiplication ∧_k: through-strand gluing plus the ⋆-type
/// contraction between the middles. ∧₀ coincides with ⋆.
pub fn wedge_k(a: &TowerElement, b: &TowerElement) -> Result<TowerElement, CupError> {
    wedge_k_conv(a, b, TowerConvention::Standard)
}

pub fn wedge_k_conv(
    a: &TowerElement,
    b: &TowerElement,
    conv: TowerConvention,
) -> Result<TowerElement, CupError> {
    if a.k != b.k {
        return Err(CupError::ThroughCountMismatch);
    }
    let k = a.k;
    let ctx = a.element.ctx();
    let mut out = GrElement::zero(ctx);
    for (wa, ca) in a.element.terms() {
        let (la, ma, ra) = segment(wa, k);
        for (wb, cb) in b.element.terms() {
            let (lb, mb, rb) = segment(wb, k);
            let matched = match conv {
                TowerConvention::Standard => ra.iter().rev().eq(lb.iter()),
                TowerConvention::Reflected => ra.iter().eq(lb.iter()),
            };
            if !matched {
                continue;
            }
            let coeff = ca * cb;
            let max_j = ma
                .iter()
                .rev()
                .zip(mb.iter())
                .take_while(|(x, y)| x == y)
                .count();
            for j in 0..=max_j {
                let mut w = Vec::with_capacity(wa.degree() + wb.degree() - 2 * k - 2 * j);
                w.extend_from_slice(la);
                w.extend_from_slice(&ma[..ma.len() - j]);
                w.extend_from_slice(&mb[j..]);
                w.extend_from_slice(rb);
                out.add_term(Word::new(w), coeff.clone());
            }
        }
    }
    TowerElement::new(k, out)
}

/// The unit of (Gr_k(P), ∧_k): Σ_u (u | ∅ | reverse(u)).
pub fn tower_unit(ctx: &Context, k: usize) -> TowerElement {
    tower_unit_conv(ctx, k, TowerConvention::Standard)
}

pub fn tower_unit_conv(ctx: &Context, k: usize, conv: TowerConvention) -> TowerElement {
    let one = FieldScalar::one(ctx.scalars());
    let mut e = GrElement::zero(ctx);
    for u in crate::ncpoly::words_of_degree(ctx.letters(), k) {
        let w = match conv {
            TowerConvention::Standard => u.concat(&u.reversed()),
            TowerConvention::Reflected => u.concat(&u),
        };
        e.add_term(w, one.clone());
    }
    TowerElement { k, element: e }
}

/// The unital trace-preserving embedding Gr_k → Gr_{k+1}: one extra
/// through-strand wrapped around each side, (ℓ|m|r) ↦ Σ_i (i·ℓ | m | r·i).
pub fn include_up(a: &TowerElement) -> TowerElement {
    include_up_conv(a, TowerConvention::Standard)
}

pub fn include_up_conv(a: &TowerElement, conv: TowerConvention) -> TowerElement {
    let ctx = a.element.ctx();
    let l = ctx.letters();
    let mut out = GrElement::zero(ctx);
    for (w, c) in a.element.terms() {
        let ls = w.letters();
        for i in 1..=l {
            let mut v = Vec::with_capacity(ls.len() + 2);
            v.push(i);
            v.extend_from_slice(ls);
            match conv {
                TowerConvention::Standard => v.push(i),
                TowerConvention::Reflected => {
                    // mirror: prepend on the right segment instead
                    v.insert(ls.len() - a.k + 1, i);
                }
            }
            out.add_term(Word::new(v), c.clone());
        }
    }
    TowerElement {
        k: a.k + 1,
        element: out,
    }
}

/// τ_k(a) = δ^{−k}·⟨a, 1_k⟩, normalized so that τ_k(1_k) = 1.
/// The unnormalized pairing ⟨·, 1_k⟩ gives ⟨1_k, 1_k⟩ = δ^k; the δ^{−k}
/// factor makes the tower inclusions trace-preserving with τ(1) = 1.
pub fn tower_trace(a: &TowerElement) -> FieldScalar {
    let ctx = a.element.ctx();
    let unit = tower_unit(ctx, a.k);
    &FieldScalar::delta_pow(ctx.scalars(), -(a.k as i64)) * &a.element.inner(&unit.element)
}

/// Lifts an ordinary graded element into the tower at level 0.
pub fn tower_of(e: &GrElement) -> TowerElement {
    TowerElement {
        k: 0,
        element: e.clone(),
    }
}

/// Verifies that the degree-2k pure-through elements (u|∅|v) commute with
/// include_up^k of every word of degree ≤ degree_cap, and that their ∧_k
/// products reproduce the ×-product table of (P_{2k}, ×).
pub fn relative_commutant_check(
    ctx: &Context,
    k: usize,
    degree_cap: usize,
) -> Result<CheckOutcome, CupError> {
    if k == 0 {
        return Ok(CheckOutcome::pass());
    }
    let one = FieldScalar::one(ctx.scalars());
    let mut pure: Vec<(Word, TowerElement)> = Vec::new();
    for w in crate::ncpoly::words_of_degree(ctx.letters(), 2 * k) {
        let e = TowerElement::new(k, GrElement::monomial(ctx, w.clone(), one.clone()))?;
        pure.push((w, e));
    }
    // ∧ product table matches ×.
    for (wa, a) in &pure {
        for (wb, b) in &pure {
            let lhs = wedge_k(a, b)?;
            let ea = GrElement::monomial(ctx, wa.clone(), one.clone());
            let eb = GrElement::monomial(ctx, wb.clone(), one.clone());
            let rhs = times_j(&ea, &eb, k)?;
            if lhs.element != rhs {
                return Ok(CheckOutcome::fail(format!(
                    "pure-through product {}∧{} = {} differs from ×: {}",
                    wa, wb, lhs.element, rhs
                )));
            }
        }
    }
    // Commutation with the embedded copy of the level-0 algebra.
    for d in 0..=degree_cap {
        for m in crate::ncpoly::words_of_degree(ctx.letters(), d) {
            let mut lifted = tower_of(&GrElement::monomial(ctx, m.clone(), one.clone()));
            for _ in 0..k {
                lifted = include_up(&lifted);
            }
            for (wa, a) in &pure {
                let ab = wedge_k(a, &lifted)?;
                let ba = wedge_k(&lifted, a)?;
                if ab.element != ba.element {
                    return Ok(CheckOutcome::fail(format!(
                        "({}|∅|·) does not commute with include_up^{}({})",
                        wa, k, m
                    )));
                }
            }
        }
    }
    Ok(CheckOutcome::pass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::sample::{random_element, SplitMix64};
    use crate::scalars::rat;

    fn family2() -> EbFamily {
        let ctx = Context::new(2);
        let b = GrElement::letter(&ctx, 1).unwrap();
        EbFamily::new(&b).unwrap()
    }

    #[test]
    fn family_requires_unit_one_box() {
        let ctx = Context::new(2);
        let cup = GrElement::cup(&ctx);
        assert_eq!(EbFamily::new(&cup).unwrap_err(), CupError::NotUnitOneBox);
        let two_b = &GrElement::letter(&ctx, 1).unwrap() * &FieldScalar::from_int(ctx.scalars(), 2);
        assert_eq!(EbFamily::new(&two_b).unwrap_err(), CupError::NotUnitOneBox);
    }

    #[test]
    fn eb_norms_match_formulas() {
        let fam = family2();
        let sc = fam.ctx().scalars().clone();
        // degree_cap = 1: only BCup(0), norm 1
        let basis = fam.basis(1);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].kind, EbKind::BCup(0));
        assert!(basis[0].norm_sq.is_one());
        // degree_cap = 3: BCup(0), BCup(1) norm² = δ = 2, ZCup(0,0) norm² = 3/2
        let basis = fam.basis(3);
        let kinds: Vec<EbKind> = basis.iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            vec![EbKind::BCup(0), EbKind::BCup(1), EbKind::ZCup(0, 0)]
        );
        assert_eq!(basis[1].norm_sq, FieldScalar::from_int(&sc, 2));
        assert_eq!(basis[2].norm_sq, FieldScalar::from_rational(&sc, rat(3, 2)));
        // norm formula √(norm²) holds for every vector up to degree 9
        for v in fam.basis(9) {
            let s = fam.sqrt_norm(v.kind);
            assert_eq!(&s * &s, v.norm_sq, "{}", v.kind);
            assert!(fam.normalized(v.kind).norm_sq().is_one());
        }
    }

    #[test]
    fn eb_gram_is_identity() {
        let fam = family2();
        let normalized: Vec<GrElement> =
            fam.basis(9).iter().map(|v| fam.normalized(v.kind)).collect();
        let g = gram(&normalized);
        assert!(g.is_identity());
    }

    #[test]
    fn eb_span_dimension_matches_enumeration() {
        // At each degree n the family elements are independent: exact rank
        // equals the count predicted by the η_b index map.
        let fam = family2();
        let ctx = fam.ctx().clone();
        for n in (1..=9usize).step_by(2) {
            let kinds = EbKind::of_degree(n);
            let expected = 1 + if n >= 3 { (n - 1) / 2 } else { 0 };
            assert_eq!(kinds.len(), expected);
            let dim = ctx.letters() as usize;
            let mut m = Mat::filled(
                kinds.len(),
                dim.pow(n as u32),
                FieldScalar::zero(ctx.scalars()),
            );
            for (i, k) in kinds.iter().enumerate() {
                for (c, x) in fam.vector(*k).element.coords(n).unwrap().into_iter().enumerate() {
                    m.set(i, c, x);
                }
            }
            assert_eq!(m.rank(), kinds.len());
        }
    }

    #[test]
    fn cup_action_matches_closed_forms() {
        let fam = family2();
        let ctx = fam.ctx().clone();
        for side in [CupSide::Left, CupSide::Right] {
            for k in 0..=3usize {
                for r in 0..=3usize {
                    for kind in [EbKind::BCup(r), EbKind::ZCup(k, r)] {
                        let mut got = fam.cup_action_expand(side, kind).unwrap();
                        got.sort_by_key(|(k, _)| *k);
                        let want = predicted_cup_expansion(&ctx, side, kind);
                        assert_eq!(got, want, "{:?} on {}", side, kind);
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_model_small_grid() {
        let ctx = Context::new(2);
        let b = GrElement::letter(&ctx, 1).unwrap();
        let out = alpha_model_check(&b, 3, 3).unwrap();
        assert!(out.pass, "{:?}", out.witness);
        // also for l = 3 and b = X₂
        let ctx3 = Context::new(3);
        let b3 = GrElement::letter(&ctx3, 2).unwrap();
        let out3 = alpha_model_check(&b3, 2, 2).unwrap();
        assert!(out3.pass, "{:?}", out3.witness);
    }

    #[test]
    fn coarse_identities() {
        let ctx = Context::new(2);
        let v_basis = vn_basis(&ctx, 2).unwrap();
        let v = &v_basis[0];
        // unit-normalize not needed; identity is bilinear
        assert!(coarse_check_v(v, v, 0, 0, 0, 0).unwrap().pass);
        assert!(coarse_check_v(v, v, 1, 1, 1, 1).unwrap().pass);
        assert!(coarse_check_v(v, v, 1, 0, 0, 1).unwrap().pass);
        let w = &v_basis[1];
        for (k, r, k2, r2) in [(0, 0, 0, 0), (2, 1, 2, 1), (1, 0, 0, 0), (0, 2, 2, 0)] {
            assert!(coarse_check_v(v, w, k, r, k2, r2).unwrap().pass);
        }
        let cup = GrElement::cup(&ctx);
        assert_eq!(
            coarse_check_v(&cup, v, 0, 0, 0, 0).unwrap_err(),
            CupError::NotInV
        );
    }

    #[test]
    fn e123_dimensions() {
        let ctx = Context::new(2);
        let r0 = e123_decomposition(&ctx, 0).unwrap();
        assert_eq!((r0.cup_dim, r0.onebox_dim, r0.v_dim), (1, 0, 0));
        assert!(r0.pass());
        let r1 = e123_decomposition(&ctx, 1).unwrap();
        assert_eq!((r1.cup_dim, r1.onebox_dim, r1.v_dim), (0, 2, 0));
        assert!(r1.pass());
        let r2 = e123_decomposition(&ctx, 2).unwrap();
        assert_eq!((r2.cup_dim, r2.onebox_dim, r2.v_dim), (1, 0, 3));
        assert!(r2.pass());
        for n in 3..=5 {
            let r = e123_decomposition(&ctx, n).unwrap();
            assert!(r.pass(), "degree {n}: {r:?}");
        }
    }

    #[test]
    fn wedge_zero_is_star() {
        let ctx = Context::new(2);
        let mut rng = SplitMix64::new(103);
        for _ in 0..200 {
            let a = random_element(&mut rng, &ctx, 4, 3);
            let b = random_element(&mut rng, &ctx, 4, 3);
            let w = wedge_k(&tower_of(&a), &tower_of(&b)).unwrap();
            assert_eq!(w.element, a.star(&b));
        }
    }

    #[test]
    fn wedge_example_and_unit() {
        let ctx = Context::new(2);
        let one = FieldScalar::one(ctx.scalars());
        // (1|X₁|1) ∧ (1|X₁|1) = (1|X₁X₁|1) + (1|∅|1)
        let x = TowerElement::new(1, GrElement::word(&ctx, Word::new(vec![1, 1, 1]))).unwrap();
        let p = wedge_k(&x, &x).unwrap();
        let mut expect = GrElement::monomial(&ctx, Word::new(vec![1, 1, 1, 1]), one.clone());
        expect.add_term(Word::new(vec![1, 1]), one);
        assert_eq!(p.element, expect);
        // units act as identities on both sides
        for k in 0..=2usize {
            let unit = tower_unit(&ctx, k);
            let mut rng = SplitMix64::new(k as u64 + 5);
            for _ in 0..20 {
                let deg = 2 * k + rng.below(3) as usize;
                let a =
                    TowerElement::new(k, crate::sample::random_homogeneous(&mut rng, &ctx, deg, 3))
                        .unwrap();
                assert_eq!(wedge_k(&unit, &a).unwrap(), a);
                assert_eq!(wedge_k(&a, &unit).unwrap(), a);
            }
        }
    }

    #[test]
    fn tower_is_associative_and_tracial() {
        let ctx = Context::new(2);
        let mut rng = SplitMix64::new(107);
        for k in 0..=2usize {
            for _ in 0..100 {
                let mk = |rng: &mut SplitMix64| {
                    let extra = rng.below(3) as usize;
                    let deg = 2 * k + extra;
                    let e = crate::sample::random_homogeneous(rng, &ctx, deg, 3);
                    TowerElement::new(k, e).unwrap()
                };
                let a = mk(&mut rng);
                let b = mk(&mut rng);
                let c = mk(&mut rng);
                let ab_c = wedge_k(&wedge_k(&a, &b).unwrap(), &c).unwrap();
                let a_bc = wedge_k(&a, &wedge_k(&b, &c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc);
                // traciality
                let tab = tower_trace(&wedge_k(&a, &b).unwrap());
                let tba = tower_trace(&wedge_k(&b, &a).unwrap());
                assert_eq!(tab, tba);
                // involution anti-automorphism for ∧
                assert_eq!(
                    wedge_k(&a, &b).unwrap().involution(),
                    wedge_k(&b.involution(), &a.involution()).unwrap()
                );
            }
        }
    }

    #[test]
    fn inclusion_is_trace_preserving_homomorphism() {
        let ctx = Context::new(2);
        let mut rng = SplitMix64::new(109);
        for k in 0..=2usize {
            assert_eq!(include_up(&tower_unit(&ctx, k)), tower_unit(&ctx, k + 1));
            for _ in 0..60 {
                let mk = |rng: &mut SplitMix64| {
                    let deg = 2 * k + rng.below(3) as usize;
                    TowerElement::new(k, crate::sample::random_homogeneous(rng, &ctx, deg, 3))
                        .unwrap()
                };
                let a = mk(&mut rng);
                let b = mk(&mut rng);
                assert_eq!(tower_trace(&include_up(&a)), tower_trace(&a));
                assert_eq!(
                    include_up(&wedge_k(&a, &b).unwrap()),
                    wedge_k(&include_up(&a), &include_up(&b)).unwrap()
                );
                assert_eq!(include_up(&a).involution(), include_up(&a.involution()));
            }
        }
    }

    #[test]
    fn commutant_table() {
        let ctx = Context::new(2);
        assert!(relative_commutant_check(&ctx, 0, 4).unwrap().pass);
        let out = relative_commutant_check(&ctx, 1, 6).unwrap();
        assert!(out.pass, "{:?}", out.witness);
        let out2 = relative_commutant_check(&ctx, 2, 3).unwrap();
        assert!(out2.pass, "{:?}", out2.witness);
    }

    #[test]
    fn reflected_convention_is_consistent_too() {
        // The mirrored convention also gives a unital algebra; the default is
        // pinned by matching the ×-table labels verbatim.
        let ctx = Context::new(2);
        let mut rng = SplitMix64::new(113);
        let k = 1usize;
        let unit = tower_unit_conv(&ctx, k, TowerConvention::Reflected);
        for _ in 0..40 {
            let deg = 2 * k + rng.below(3) as usize;
            let a = TowerElement::new(k, crate::sample::random_homogeneous(&mut rng, &ctx, deg, 3))
                .unwrap();
            assert_eq!(
                wedge_k_conv(&unit, &a, TowerConvention::Reflected).unwrap(),
                a
            );
            assert_eq!(
                wedge_k_conv(&a, &unit, TowerConvention::Reflected).unwrap(),
                a
            );
        }
    }
}
