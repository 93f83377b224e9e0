//! The graded algebra of noncommutative polynomials in l letters, with the
//! two products of the construction: ⋆ (sum over partial contractions
//! between the tail of the left word and the head of the right word) and
//! • (graded concatenation), together with trace, inner product, caps, cup,
//! and the positivity machinery behind the multiplication bound.
//!
//! Words of each degree are an orthonormal basis: the pairing tangle joins
//! the two boxes' boundary points straight across, so ⟨w, v⟩ = 1{w = v} and
//! all inner products reduce to coefficient sums. `trace(a ⋆ b*)` is kept as
//! a redundant cross-check path in the test suites.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{dense_opnorm, jacobi_eigenvalues, Mat, SparseMat};
use crate::scalars::{Ctx, DeltaContext, FieldScalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NcError {
    /// Cap operations are undefined on degree-0 and degree-1 components.
    CapOnLowDegree,
    /// Operation requires a homogeneous element.
    NotHomogeneous,
    /// Element degree does not match the operation's arity.
    DegreeMismatch,
    /// Strand or letter index out of range.
    IndexOutOfRange,
}

impl fmt::Display for NcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NcError::CapOnLowDegree => write!(f, "cap undefined on components of degree < 2"),
            NcError::NotHomogeneous => write!(f, "element is not homogeneous"),
            NcError::DegreeMismatch => write!(f, "element degree does not match the operation"),
            NcError::IndexOutOfRange => write!(f, "index out of range"),
        }
    }
}

/// Monomial word over the letters `1..=l`; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Base-l rank of the word among all words of its degree.
    pub fn rank(&self, l: u8) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &c| acc * l as usize + (c - 1) as usize)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree-major, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for c in &self.0 {
            write!(f, "X{}", c)?;
        }
        Ok(())
    }
}

/// All words of exactly `degree` letters, in lexicographic order.
pub fn words_of_degree(l: u8, degree: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity((l as usize).pow(degree as u32));
    let mut current = vec![1u8; degree];
    loop {
        out.push(Word(current.clone()));
        let mut i = degree;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < l {
                current[i] += 1;
                current[i + 1..].fill(1);
                break;
            }
        }
    }
}

/// Algebra context: letter count l and the shared scalar ring.
///
/// δ defaults to l, the closed-loop value of the l-letter tensor planar
/// algebra; a free δ is allowed for generic tangle evaluation only.
#[derive(Clone, Debug)]
pub struct Context {
    letters: u8,
    scalars: Ctx,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && self.scalars == other.scalars
    }
}
impl Eq for Context {}

impl Context {
    pub fn new(letters: u8) -> Self {
        assert!(letters >= 1, "at least one letter");
        Context {
            letters,
            scalars: DeltaContext::from_letters(letters),
        }
    }

    /// Context with a loop value decoupled from the letter count. The cup
    /// subalgebra identities require δ = l; this is for generic tangles.
    pub fn with_delta(letters: u8, scalars: Ctx) -> Self {
        assert!(letters >= 1, "at least one letter");
        Context { letters, scalars }
    }

    pub fn letters(&self) -> u8 {
        self.letters
    }

    pub fn scalars(&self) -> &Ctx {
        &self.scalars
    }

    pub fn delta_scalar(&self) -> FieldScalar {
        FieldScalar::from_rational(&self.scalars, self.scalars.delta().clone())
    }
}

/// Finite linear combination of words with exact coefficients, graded by
/// word length. Zero coefficients are pruned eagerly; words are kept in
/// degree-major lexicographic order by the map.
#[derive(Clone, PartialEq, Eq)]
pub struct GrElement {
    terms: BTreeMap<Word, FieldScalar>,
    ctx: Context,
}

impl GrElement {
    pub fn zero(ctx: &Context) -> Self {
        GrElement {
            terms: BTreeMap::new(),
            ctx: ctx.clone(),
        }
    }

    /// The unit: the empty diagram.
    pub fn one(ctx: &Context) -> Self {
        GrElement::monomial(ctx, Word::empty(), FieldScalar::one(&ctx.scalars))
    }

    pub fn monomial(ctx: &Context, w: Word, coeff: FieldScalar) -> Self {
        let mut e = GrElement::zero(ctx);
        e.add_term(w, coeff);
        e
    }

    pub fn word(ctx: &Context, w: Word) -> Self {
        let one = FieldScalar::one(&ctx.scalars);
        GrElement::monomial(ctx, w, one)
    }

    /// The generator X_i (1-based).
    pub fn letter(ctx: &Context, i: u8) -> Result<Self, NcError> {
        if i == 0 || i > ctx.letters {
            return Err(NcError::IndexOutOfRange);
        }
        Ok(GrElement::word(ctx, Word::letter(i)))
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &FieldScalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> FieldScalar {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| FieldScalar::zero(&self.ctx.scalars))
    }

    pub fn add_term(&mut self, w: Word, coeff: FieldScalar) {
        if coeff.is_zero() {
            return;
        }
        for &c in w.letters() {
            assert!(c >= 1 && c <= self.ctx.letters, "letter out of range");
        }
        match self.terms.entry(w) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn assert_ctx(&self, other: &Self) {
        assert!(self.ctx == other.ctx, "algebra context mismatch");
    }

    /// Maximal word degree; None when zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::degree).max()
    }

    /// The degree when the element is homogeneous (zero counts as any).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Word::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn homogeneous_part(&self, n: usize) -> GrElement {
        let mut out = GrElement::zero(&self.ctx);
        for (w, c) in &self.terms {
            if w.degree() == n {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.terms.keys().map(Word::degree).collect();
        ds.dedup();
        ds
    }

    /// The ⋆ product: sum over partial contractions matching the tail of the
    /// left word against the head of the right word,
    /// u ⋆ v = Σ_k 1{u ends with reverse(v[..k])} · u[..n−k]·v[k..].
    pub fn star(&self, other: &Self) -> Self {
        self.assert_ctx(other);
        let mut out = GrElement::zero(&self.ctx);
        for (u, cu) in &self.terms {
            let ul = u.letters();
            for (v, cv) in &other.terms {
                let vl = v.letters();
                let coeff = cu * cv;
                let max_k = ul
                    .iter()
                    .rev()
                    .zip(vl.iter())
                    .take_while(|(a, b)| a == b)
                    .count();
                for k in 0..=max_k {
                    let mut w = Vec::with_capacity(ul.len() + vl.len() - 2 * k);
                    w.extend_from_slice(&ul[..ul.len() - k]);
                    w.extend_from_slice(&vl[k..]);
                    out.add_term(Word::new(w), coeff.clone());
                }
            }
        }
        out
    }

    /// The • product: graded concatenation of boxes.
    pub fn bullet(&self, other: &Self) -> Self {
        self.assert_ctx(other);
        let mut out = GrElement::zero(&self.ctx);
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                out.add_term(u.concat(v), cu * cv);
            }
        }
        out
    }

    /// The anti-linear involution: box reflection, i.e. word reversal.
    /// Coefficients here are real, so conjugation is the identity.
    pub fn involution(&self) -> Self {
        let mut out = GrElement::zero(&self.ctx);
        for (w, c) in &self.terms {
            out.add_term(w.reversed(), c.clone());
        }
        out
    }

    /// The trace: the zero-graded piece.
    pub fn trace(&self) -> FieldScalar {
        self.coeff(&Word::empty())
    }

    /// ⟨a, b⟩ = Σ_w coeff_a(w)·coeff_b(w); equals trace(a ⋆ b*).
    pub fn inner(&self, other: &Self) -> FieldScalar {
        self.assert_ctx(other);
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = FieldScalar::zero(&self.ctx.scalars);
        for (w, c) in &small.terms {
            if let Some(d) = large.terms.get(w) {
                acc += &(c * d);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> FieldScalar {
        self.inner(self)
    }

    /// The cup element Σ_i X_i X_i ∈ P₂.
    pub fn cup(ctx: &Context) -> Self {
        let one = FieldScalar::one(&ctx.scalars);
        let mut e = GrElement::zero(ctx);
        for i in 1..=ctx.letters {
            e.add_term(Word::new(vec![i, i]), one.clone());
        }
        e
    }

    /// ∪^{•r}: the r-fold • power, with ∪^{•0} = 1 and ∪^{•r} = 0 for r < 0.
    pub fn cup_pow(ctx: &Context, r: i64) -> Self {
        if r < 0 {
            return GrElement::zero(ctx);
        }
        let cup = GrElement::cup(ctx);
        let mut acc = GrElement::one(ctx);
        for _ in 0..r {
            acc = acc.bullet(&cup);
        }
        acc
    }

    /// Cap on the first two letters: X_{i1}X_{i2}w ↦ 1{i1=i2}·w.
    /// Errors when any component has degree < 2; the construction never caps
    /// P₀ or P₁, so a silent 0 would mask caller bugs.
    pub fn cap_left(&self) -> Result<Self, NcError> {
        let mut out = GrElement::zero(&self.ctx);
        for (w, c) in &self.terms {
            let ls = w.letters();
            if ls.len() < 2 {
                return Err(NcError::CapOnLowDegree);
            }
            if ls[0] == ls[1] {
                out.add_term(Word::new(ls[2..].to_vec()), c.clone());
            }
        }
        Ok(out)
    }

    /// Cap on the last two letters.
    pub fn cap_right(&self) -> Result<Self, NcError> {
        let mut out = GrElement::zero(&self.ctx);
        for (w, c) in &self.terms {
            let ls = w.letters();
            if ls.len() < 2 {
                return Err(NcError::CapOnLowDegree);
            }
            if ls[ls.len() - 1] == ls[ls.len() - 2] {
                out.add_term(Word::new(ls[..ls.len() - 2].to_vec()), c.clone());
            }
        }
        Ok(out)
    }

    /// Coordinates in the word basis of P_n.
    pub fn coords(&self, n: usize) -> Result<Vec<FieldScalar>, NcError> {
        if self.terms.keys().any(|w| w.degree() != n) {
            return Err(NcError::DegreeMismatch);
        }
        let l = self.ctx.letters;
        let zero = FieldScalar::zero(&self.ctx.scalars);
        let mut v = vec![zero; (l as usize).pow(n as u32)];
        for (w, c) in &self.terms {
            v[w.rank(l)] = c.clone();
        }
        Ok(v)
    }

    pub fn from_coords(ctx: &Context, n: usize, coords: &[FieldScalar]) -> Self {
        let words = words_of_degree(ctx.letters, n);
        assert_eq!(words.len(), coords.len());
        let mut out = GrElement::zero(ctx);
        for (w, c) in words.into_iter().zip(coords) {
            out.add_term(w, c.clone());
        }
        out
    }
}

impl fmt::Display for GrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{}", w)?;
            } else if w.degree() == 0 {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})·{}", c, w)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl core::ops::AddAssign<&GrElement> for GrElement {
    fn add_assign(&mut self, rhs: &GrElement) {
        self.assert_ctx(rhs);
        for (w, c) in &rhs.terms {
            self.add_term(w.clone(), c.clone());
        }
    }
}

impl core::ops::Add<&GrElement> for &GrElement {
    type Output = GrElement;
    fn add(self, rhs: &GrElement) -> GrElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl core::ops::Sub<&GrElement> for &GrElement {
    type Output = GrElement;
    fn sub(self, rhs: &GrElement) -> GrElement {
        self.assert_ctx(rhs);
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl core::ops::Neg for &GrElement {
    type Output = GrElement;
    fn neg(self) -> GrElement {
        let mut out = GrElement::zero(&self.ctx);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl core::ops::Mul<&FieldScalar> for &GrElement {
    type Output = GrElement;
    fn mul(self, rhs: &FieldScalar) -> GrElement {
        let mut out = GrElement::zero(&self.ctx);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * rhs);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// V_n and the Z vector
// ---------------------------------------------------------------------------

/// Exact basis of V_n = ker(cap_left) ∩ ker(cap_right) ⊂ P_n, n ≥ 2,
/// as columns of a kernel matrix in the word basis.
pub fn vn_basis(ctx: &Context, n: usize) -> Result<Vec<GrElement>, NcError> {
    if n < 2 {
        return Err(NcError::DegreeMismatch);
    }
    let l = ctx.letters as usize;
    let dim = l.pow(n as u32);
    let rows = l.pow((n - 2) as u32);
    let zero = FieldScalar::zero(&ctx.scalars);
    let one = FieldScalar::one(&ctx.scalars);
    let words = words_of_degree(ctx.letters, n);
    // Stack the two cap maps P_n → P_{n−2}.
    let mut m = Mat::filled(2 * rows, dim, zero.clone());
    for (col, w) in words.iter().enumerate() {
        let ls = w.letters();
        if ls[0] == ls[1] {
            let r = Word::new(ls[2..].to_vec()).rank(ctx.letters);
            m.set(r, col, one.clone());
        }
        if ls[n - 1] == ls[n - 2] {
            let r = Word::new(ls[..n - 2].to_vec()).rank(ctx.letters);
            m.set(rows + r, col, one.clone());
        }
    }
    let kernel = m.kernel_basis(&zero);
    let mut basis = Vec::with_capacity(kernel.cols());
    for j in 0..kernel.cols() {
        let coords: Vec<FieldScalar> = (0..dim).map(|r| kernel.at(r, j).clone()).collect();
        basis.push(GrElement::from_coords(ctx, n, &coords));
    }
    Ok(basis)
}

impl GrElement {
    /// Orthogonal projection onto V_n, by exact linear algebra. The residual
    /// a − proj lies in W_n = span{y•∪, ∪•z : y, z ∈ P_{n−2}}.
    pub fn vn_project(&self, n: usize) -> Result<GrElement, NcError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        if self.homogeneous_degree() != Some(n) {
            return Err(NcError::NotHomogeneous);
        }
        let basis = vn_basis(&self.ctx, n)?;
        if basis.is_empty() {
            return Ok(GrElement::zero(&self.ctx));
        }
        // proj = K (KᵀK)⁻¹ Kᵀ a, with K the kernel basis; words are
        // orthonormal so the Gram matrix is just KᵀK.
        let k = basis.len();
        let gram = Mat::from_fn(k, k, |i, j| basis[i].inner(&basis[j]));
        let rhs: Vec<FieldScalar> = basis.iter().map(|v| v.inner(self)).collect();
        let coeffs = gram.solve(&rhs).expect("kernel basis is independent");
        let mut proj = GrElement::zero(&self.ctx);
        for (c, v) in coeffs.iter().zip(&basis) {
            proj += &(v * c);
        }
        Ok(proj)
    }

    /// Membership in V_n: both caps vanish exactly.
    pub fn is_in_v(&self) -> Result<bool, NcError> {
        Ok(self.cap_left()?.is_zero() && self.cap_right()?.is_zero())
    }
}

/// The unnormalized Z̃_b = ∪•b − δ⁻¹·b•∪ for b ∈ P₁, together with its exact
/// squared norm ‖b‖²·(δ−δ⁻¹). Dividing by √(δ−δ⁻¹) (exact in the ring)
/// yields the unit vector Z_b of the orthonormal family; a right cap kills
/// it.
pub fn z_vector(b: &GrElement) -> Result<(GrElement, FieldScalar), NcError> {
    if b.homogeneous_degree() != Some(1) {
        return Err(NcError::DegreeMismatch);
    }
    let ctx = b.ctx();
    let cup = GrElement::cup(ctx);
    let delta_inv = FieldScalar::delta_pow(ctx.scalars(), -1);
    let z = &cup.bullet(b) - &(&b.bullet(&cup) * &delta_inv);
    let norm_sq = z.norm_sq();
    Ok((z, norm_sq))
}

// ---------------------------------------------------------------------------
// The C*-algebras (P_{2j}, ×) and the multiplication bound
// ---------------------------------------------------------------------------

/// The composition product on P_{2j}: writing words as u·v with |u|=|v|=j,
/// (u·v) × (u′·v′) = 1{reverse(v) = u′} · (u·v′).
pub fn times_j(c: &GrElement, d: &GrElement, j: usize) -> Result<GrElement, NcError> {
    c.assert_ctx(d);
    for e in [c, d] {
        if !e.is_zero() && e.homogeneous_degree() != Some(2 * j) {
            return Err(NcError::DegreeMismatch);
        }
    }
    let mut out = GrElement::zero(c.ctx());
    for (u, cu) in c.terms() {
        let ul = u.letters();
        let (u1, v1) = ul.split_at(j);
        for (w, cw) in d.terms() {
            let wl = w.letters();
            let (u2, v2) = wl.split_at(j);
            if v1.iter().rev().eq(u2.iter()) {
                let mut word = Vec::with_capacity(2 * j);
                word.extend_from_slice(u1);
                word.extend_from_slice(v2);
                out.add_term(Word::new(word), cu * cw);
            }
        }
    }
    Ok(out)
}

/// Identity of (P_{2j}, ×): Σ_u u·reverse(u). For j = 1 this is the cup.
pub fn times_identity(ctx: &Context, j: usize) -> GrElement {
    let one = FieldScalar::one(ctx.scalars());
    let mut out = GrElement::zero(ctx);
    for u in words_of_degree(ctx.letters(), j) {
        out.add_term(u.concat(&u.reversed()), one.clone());
    }
    out
}

/// Faithful matrix picture of (P_{2j}, ×): the word u·v maps to the matrix
/// unit E_{u, reverse(v)}, so × becomes matrix multiplication and the
/// involution becomes the transpose.
pub struct MatAlgebra2j {
    j: usize,
    dim: usize,
    mat: Mat<FieldScalar>,
}

impl MatAlgebra2j {
    pub fn from_element(a: &GrElement, j: usize) -> Result<Self, NcError> {
        if !a.is_zero() && a.homogeneous_degree() != Some(2 * j) {
            return Err(NcError::DegreeMismatch);
        }
        let l = a.ctx().letters();
        let dim = (l as usize).pow(j as u32);
        let mut mat = Mat::filled(dim, dim, FieldScalar::zero(a.ctx().scalars()));
        for (w, c) in a.terms() {
            let ls = w.letters();
            let (u, v) = ls.split_at(j);
            let row = Word::new(u.to_vec()).rank(l);
            let col = Word::new(v.to_vec()).reversed().rank(l);
            mat.set(row, col, c.clone());
        }
        Ok(MatAlgebra2j { j, dim, mat })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat<FieldScalar> {
        &self.mat
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim * self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.push(self.mat.at(r, c).to_f64());
            }
        }
        out
    }

    /// Operator norm ‖·‖_{P_{2j}} of the element, computed on the matrix
    /// picture.
    pub fn opnorm(&self) -> f64 {
        dense_opnorm(&self.to_f64(), self.dim, self.dim)
    }

    /// Smallest eigenvalue; meaningful for self-adjoint elements.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_f64();
        jacobi_eigenvalues(&m, self.dim)
            .first()
            .copied()
            .unwrap_or(0.0)
    }
}

/// Checks that the × product on the word basis of P_{2j} is the matrix-unit
/// calculus: every word maps to a distinct matrix unit and the products
/// multiply accordingly.
pub fn times_table_is_matrix_units(ctx: &Context, j: usize) -> Result<bool, NcError> {
    let l = ctx.letters();
    let dim = (l as usize).pow(j as u32);
    let words = words_of_degree(l, 2 * j);
    let one = FieldScalar::one(ctx.scalars());
    let mut seen = vec![false; dim * dim];
    for w in &words {
        let m = MatAlgebra2j::from_element(&GrElement::monomial(ctx, w.clone(), one.clone()), j)?;
        let mut unit_pos = None;
        for r in 0..dim {
            for c in 0..dim {
                let e = m.matrix().at(r, c);
                if e.is_one() && unit_pos.is_none() {
                    unit_pos = Some(r * dim + c);
                } else if !e.is_zero() {
                    return Ok(false);
                }
            }
        }
        match unit_pos {
            Some(p) if !seen[p] => seen[p] = true,
            _ => return Ok(false),
        }
    }
    for w1 in &words {
        let e1 = GrElement::monomial(ctx, w1.clone(), one.clone());
        let m1 = MatAlgebra2j::from_element(&e1, j)?;
        for w2 in &words {
            let e2 = GrElement::monomial(ctx, w2.clone(), one.clone());
            let m2 = MatAlgebra2j::from_element(&e2, j)?;
            let p = MatAlgebra2j::from_element(&times_j(&e1, &e2, j)?, j)?;
            if m1.matrix().mul(m2.matrix()) != *p.matrix() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Which side of the box the partial self-pairing of α_j contracts.
/// The two choices are planar reflections of each other; positivity and the
/// norm bound hold for both, and the verification suite runs both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    /// Contract the trailing n−j strands (default).
    Tail,
    /// Contract the leading n−j strands.
    Head,
}

/// α_j(a): the partial self-pairing of a with a* leaving 2j free strands,
/// evaluated through the generic tangle machinery. The result is a positive
/// element of (P_{2j}, ×).
pub fn alpha_j(a: &GrElement, j: usize, side: PairSide) -> Result<GrElement, NcError> {
    let n = a.homogeneous_degree().ok_or(NcError::NotHomogeneous)?;
    if j > n {
        return Err(NcError::IndexOutOfRange);
    }
    let t = crate::tangle::alpha_tangle(n, j, side);
    crate::tangle::evaluate(&t, &[a.clone(), a.involution()], a.ctx())
        .map_err(|_| NcError::DegreeMismatch)
}

/// The multiplication bound C = Σ_n Σ_{0≤j≤n} √‖α_j(a_n)‖_{P_{2j}} over the
/// homogeneous parts a_n of a. The operator norm of left-⋆-multiplication by
/// a on any degree truncation is ≤ C.
pub fn left_mult_norm_bound(a: &GrElement) -> f64 {
    use num_traits::Float;
    let mut c = 0.0f64;
    for n in a.degrees() {
        let part = a.homogeneous_part(n);
        for j in 0..=n {
            let alpha = alpha_j(&part, j, PairSide::Tail).expect("homogeneous part");
            let norm = MatAlgebra2j::from_element(&alpha, j)
                .expect("alpha_j lands in P_2j")
                .opnorm();
            c += Float::sqrt(norm.max(0.0));
        }
    }
    c
}

/// Global index of a word inside the degree-filtered basis ⊕_{m≤cap} P_m.
pub fn truncated_index(w: &Word, l: u8, cap: usize) -> usize {
    debug_assert!(w.degree() <= cap);
    let mut offset = 0usize;
    for m in 0..w.degree() {
        offset += (l as usize).pow(m as u32);
    }
    offset + w.rank(l)
}

/// Dimension of ⊕_{m≤cap} P_m.
pub fn truncated_dim(l: u8, cap: usize) -> usize {
    (0..=cap).map(|m| (l as usize).pow(m as u32)).sum()
}

/// The matrix of the compression P_cap ∘ (a ⋆ ·) ∘ P_cap on the truncated
/// graded space, as a float sparse matrix in the word basis.
pub fn left_mult_matrix(a: &GrElement, cap: usize) -> SparseMat {
    let l = a.ctx().letters();
    let dim = truncated_dim(l, cap);
    let mut triplets = Vec::new();
    for m in 0..=cap {
        for w in words_of_degree(l, m) {
            let col = truncated_index(&w, l, cap);
            let img = a.star(&GrElement::word(a.ctx(), w));
            for (out_w, c) in img.terms() {
                if out_w.degree() <= cap {
                    let row = truncated_index(out_w, l, cap);
                    triplets.push((row as u32, col as u32, c.to_f64()));
                }
            }
        }
    }
    SparseMat {
        rows: dim,
        cols: dim,
        triplets,
    }
}
