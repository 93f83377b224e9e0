//! Unshaded planar tangles as combinatorial objects.
//!
//! A tangle is stored up to isotopy: disk point counts with marked points, a
//! perfect matching on boundary points, and a count of closed loops. The
//! geometric embedding is captured by a rotation system (cyclic order of
//! points around each disk, counterclockwise); planarity is decided by the
//! Euler characteristic of the induced combinatorial map on the sphere.
//! Spherically isotopic drawings produce the same stored data, so spherical
//! invariance is built into the encoding.
//!
//! Boundary words are read counterclockwise starting at the marked point,
//! with one global convention for inner and outer disks. Evaluation depends
//! only on the matching, the marked points and the loop count; the rotation
//! system participates in validation only.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ncpoly::{Context, GrElement, PairSide, Word};
use crate::scalars::FieldScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Endpoint {
    /// 0 is the outer disk; inner disks are 1-based.
    pub disk: usize,
    pub point: usize,
}

pub fn ep(disk: usize, point: usize) -> Endpoint {
    Endpoint { disk, point }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Disk {
    pub points: usize,
    /// Reading starts at this point index and proceeds counterclockwise.
    pub star: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tangle {
    pub outer: Disk,
    pub inner: Vec<Disk>,
    pub strands: Vec<(Endpoint, Endpoint)>,
    pub loops: usize,
    /// Optional explicit rotation system: for each disk (outer first), the
    /// counterclockwise cyclic order of its point indices. Defaults to index
    /// order.
    pub rotation: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TangleError {
    Invalid(String),
    ArityMismatch,
    InputCount,
    InputNotHomogeneous,
    DegreeMismatch,
}

impl core::fmt::Display for TangleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TangleError::Invalid(reason) => write!(f, "invalid tangle: {}", reason),
            TangleError::ArityMismatch => write!(f, "disk arity mismatch"),
            TangleError::InputCount => write!(f, "input count does not match inner disk count"),
            TangleError::InputNotHomogeneous => write!(f, "tangle inputs must be homogeneous"),
            TangleError::DegreeMismatch => write!(f, "input degree does not match disk points"),
        }
    }
}

impl Tangle {
    pub fn new(
        outer: Disk,
        inner: Vec<Disk>,
        strands: Vec<(Endpoint, Endpoint)>,
        loops: usize,
    ) -> Self {
        Tangle {
            outer,
            inner,
            strands,
            loops,
            rotation: None,
        }
    }

    fn disk(&self, id: usize) -> &Disk {
        if id == 0 {
            &self.outer
        } else {
            &self.inner[id - 1]
        }
    }

    fn disk_count(&self) -> usize {
        self.inner.len() + 1
    }

    pub fn with_extra_loops(&self, n: usize) -> Tangle {
        let mut t = self.clone();
        t.loops += n;
        t
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Well-formedness: perfect matching on boundary points, marked points in
    /// range, and genus zero (Euler characteristic 2 on every connected
    /// component of the combinatorial map).
    pub fn validate(&self) -> Result<(), String> {
        let disks = self.disk_count();
        for id in 0..disks {
            let d = self.disk(id);
            if d.points > 0 && d.star >= d.points {
                return Err(format!("marked point out of range on disk {}", id));
            }
        }
        // Perfect matching.
        let total: usize = (0..disks).map(|id| self.disk(id).points).sum();
        if total != 2 * self.strands.len() {
            return Err(format!(
                "{} boundary points but {} strand endpoints",
                total,
                2 * self.strands.len()
            ));
        }
        let mut seen: Vec<Vec<bool>> = (0..disks).map(|id| vec![false; self.disk(id).points]).collect();
        for &(a, b) in &self.strands {
            for e in [a, b] {
                if e.disk >= disks || e.point >= self.disk(e.disk).points {
                    return Err(format!("endpoint ({}, {}) out of range", e.disk, e.point));
                }
                if seen[e.disk][e.point] {
                    return Err(format!("point ({}, {}) used twice", e.disk, e.point));
                }
                seen[e.disk][e.point] = true;
            }
        }
        // Rotation system sanity.
        let rotation = self.rotation_lists()?;
        // Combinatorial map on darts. Each point hosts exactly one dart.
        // The outer disk's rotation is reversed: viewed as a vertex on the
        // sphere its boundary is traversed with the opposite orientation.
        let mut dart_of: Vec<Vec<usize>> = (0..disks)
            .map(|id| vec![usize::MAX; self.disk(id).points])
            .collect();
        let mut darts = 0usize;
        for (s, &(a, b)) in self.strands.iter().enumerate() {
            dart_of[a.disk][a.point] = 2 * s;
            dart_of[b.disk][b.point] = 2 * s + 1;
            darts += 2;
        }
        // σ: next dart counterclockwise around the disk.
        let mut sigma = vec![usize::MAX; darts];
        for id in 0..disks {
            let rot = &rotation[id];
            let n = rot.len();
            if n == 0 {
                continue;
            }
            for k in 0..n {
                let from = dart_of[id][rot[k]];
                let to = if id == 0 {
                    dart_of[id][rot[(k + n - 1) % n]]
                } else {
                    dart_of[id][rot[(k + 1) % n]]
                };
                sigma[from] = to;
            }
        }
        let alpha = |d: usize| d ^ 1;
        // Connected components over ⟨σ, α⟩, counting V, E, F per component.
        let mut comp = vec![usize::MAX; darts];
        let mut n_comp = 0;
        for start in 0..darts {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = n_comp;
            while let Some(d) = stack.pop() {
                for next in [sigma[d], alpha(d)] {
                    if comp[next] == usize::MAX {
                        comp[next] = n_comp;
                        stack.push(next);
                    }
                }
            }
            n_comp += 1;
        }
        let mut vertices = vec![0usize; n_comp];
        let mut edges = vec![0usize; n_comp];
        let mut faces = vec![0usize; n_comp];
        for id in 0..disks {
            if self.disk(id).points > 0 {
                vertices[comp[dart_of[id][0]]] += 1;
            }
        }
        for s in 0..self.strands.len() {
            edges[comp[2 * s]] += 1;
        }
        // Faces: orbits of σ∘α.
        let mut visited = vec![false; darts];
        for start in 0..darts {
            if visited[start] {
                continue;
            }
            faces[comp[start]] += 1;
            let mut d = start;
            while !visited[d] {
                visited[d] = true;
                d = sigma[alpha(d)];
            }
        }
        for c in 0..n_comp {
            let chi = vertices[c] as i64 - edges[c] as i64 + faces[c] as i64;
            if chi != 2 {
                return Err(format!(
                    "Euler characteristic {} on component {} (genus {})",
                    chi,
                    c,
                    (2 - chi) / 2
                ));
            }
        }
        Ok(())
    }

    fn rotation_lists(&self) -> Result<Vec<Vec<usize>>, String> {
        let disks = self.disk_count();
        match &self.rotation {
            None => Ok((0..disks).map(|id| (0..self.disk(id).points).collect()).collect()),
            Some(lists) => {
                if lists.len() != disks {
                    return Err(format!("rotation system has {} lists for {} disks", lists.len(), disks));
                }
                for (id, rot) in lists.iter().enumerate() {
                    let n = self.disk(id).points;
                    let mut seen = vec![false; n];
                    if rot.len() != n {
                        return Err(format!("rotation list length mismatch on disk {}", id));
                    }
                    for &p in rot {
                        if p >= n || seen[p] {
                            return Err(format!("rotation list on disk {} is not a permutation", id));
                        }
                        seen[p] = true;
                    }
                }
                Ok(lists.clone())
            }
        }
    }

    /// The reflected tangle T*: mirror image, satisfying
    /// `evaluate(T*, a₁*, …) = evaluate(T, a₁, …)*`.
    pub fn reflect(&self) -> Tangle {
        let map = |e: Endpoint| {
            let d = self.disk(e.disk);
            let n = d.points;
            Endpoint {
                disk: e.disk,
                point: (d.star + n - 1 - (e.point + n - d.star) % n) % n,
            }
        };
        let mut t = self.clone();
        t.strands = self.strands.iter().map(|&(a, b)| (map(a), map(b))).collect();
        for id in 0..self.disk_count() {
            let star = self.disk(id).star;
            if id == 0 {
                t.outer.star = star;
            } else {
                t.inner[id - 1].star = star;
            }
        }
        t.rotation = None;
        t
    }
}

/// Glues tangle `inner_tangle` into the `disk_index`-th (1-based) inner disk
/// of `outer_tangle`, lining up the marked points. Strand chains crossing the
/// glued circle are merged; chains that close up become counted loops.
pub fn compose(outer_tangle: &Tangle, disk_index: usize, inner_tangle: &Tangle) -> Result<Tangle, TangleError> {
    outer_tangle.validate().map_err(TangleError::Invalid)?;
    inner_tangle.validate().map_err(TangleError::Invalid)?;
    if disk_index == 0 || disk_index > outer_tangle.inner.len() {
        return Err(TangleError::ArityMismatch);
    }
    let glue_n = outer_tangle.inner[disk_index - 1].points;
    if glue_n != inner_tangle.outer.points {
        return Err(TangleError::ArityMismatch);
    }
    let t_star = outer_tangle.inner[disk_index - 1].star;
    let s_star = inner_tangle.outer.star;
    let s_inner = inner_tangle.inner.len();

    // New disk ids: outer 0; T's disks before the hole keep their ids, S's
    // disks slot in at disk_index, T's later disks shift.
    let map_t_disk = |d: usize| -> usize {
        if d < disk_index {
            d
        } else {
            d + s_inner - 1
        }
    };
    let map_s_disk = |d: usize| disk_index - 1 + d;

    #[derive(Clone, Copy, PartialEq, Eq, Debug)]
    enum Node {
        Real(Endpoint),
        Glue(usize), // position indexed on T's glued circle
    }

    let mut edges: Vec<(Node, Node)> = Vec::new();
    for &(a, b) in &outer_tangle.strands {
        let f = |e: Endpoint| {
            if e.disk == disk_index {
                Node::Glue(e.point)
            } else {
                Node::Real(ep(map_t_disk(e.disk), e.point))
            }
        };
        edges.push((f(a), f(b)));
    }
    for &(a, b) in &inner_tangle.strands {
        let f = |e: Endpoint| {
            if e.disk == 0 {
                // S's outer point q sits at T position (t_star + (q − s_star)) mod n.
                let offset = (e.point + glue_n - s_star) % glue_n;
                Node::Glue((t_star + offset) % glue_n)
            } else {
                Node::Real(ep(map_s_disk(e.disk), e.point))
            }
        };
        edges.push((f(a), f(b)));
    }

    // Each glue position has exactly two incident edge-ends (one from each
    // side). Walk chains from real endpoints; leftover cycles are loops.
    let mut at_glue: Vec<Vec<(usize, u8)>> = vec![Vec::new(); glue_n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if let Node::Glue(p) = a {
            at_glue[p].push((i, 0));
        }
        if let Node::Glue(p) = b {
            at_glue[p].push((i, 1));
        }
    }
    for (p, ends) in at_glue.iter().enumerate() {
        if ends.len() != 2 {
            return Err(TangleError::Invalid(format!(
                "glue position {} has {} incident strand ends",
                p,
                ends.len()
            )));
        }
    }

    let end_of = |i: usize, side: u8| -> Node {
        if side == 0 {
            edges[i].0
        } else {
            edges[i].1
        }
    };
    let mut used = vec![false; edges.len()];
    let mut strands: Vec<(Endpoint, Endpoint)> = Vec::new();
    // Chains with real ends.
    for i in 0..edges.len() {
        if used[i] {
            continue;
        }
        let (a, b) = edges[i];
        let start = match (a, b) {
            (Node::Real(_), _) => 0u8,
            (_, Node::Real(_)) => 1u8,
            _ => continue,
        };
        used[i] = true;
        let Node::Real(first) = end_of(i, start) else { unreachable!() };
        let mut cur = (i, 1 - start);
        let last = loop {
            match end_of(cur.0, cur.1) {
                Node::Real(e) => break e,
                Node::Glue(p) => {
                    let &(j, jside) = at_glue[p]
                        .iter()
                        .find(|&&(j, jside)| (j, jside) != cur)
                        .expect("two ends per glue position");
                    used[j] = true;
                    cur = (j, 1 - jside);
                }
            }
        };
        strands.push((first, last));
    }
    // Remaining edges close into loops through glue positions.
    let mut new_loops = 0usize;
    for i in 0..edges.len() {
        if used[i] {
            continue;
        }
        new_loops += 1;
        used[i] = true;
        let mut cur = (i, 1u8);
        loop {
            match end_of(cur.0, cur.1) {
                Node::Real(_) => unreachable!("cycle touching a real endpoint"),
                Node::Glue(p) => {
                    let &(j, jside) = at_glue[p]
                        .iter()
                        .find(|&&(j, jside)| (j, jside) != cur)
                        .expect("two ends per glue position");
                    if j == i && jside == 0 {
                        break;
                    }
                    debug_assert!(!used[j]);
                    used[j] = true;
                    cur = (j, 1 - jside);
                }
            }
        }
    }

    let mut inner: Vec<Disk> = Vec::new();
    inner.extend_from_slice(&outer_tangle.inner[..disk_index - 1]);
    inner.extend_from_slice(&inner_tangle.inner);
    inner.extend_from_slice(&outer_tangle.inner[disk_index..]);
    let result = Tangle::new(
        outer_tangle.outer,
        inner,
        strands,
        outer_tangle.loops + inner_tangle.loops + new_loops,
    );
    result.validate().map_err(TangleError::Invalid)?;
    Ok(result)
}

/// Multilinear evaluation on the polynomial planar algebra: one letter per
/// strand, each inner disk weighted by its input's coefficient of the word
/// read counterclockwise from the marked point, a factor δ per closed loop,
/// summed over all letter assignments.
pub fn evaluate(t: &Tangle, inputs: &[GrElement], ctx: &Context) -> Result<GrElement, TangleError> {
    t.validate().map_err(TangleError::Invalid)?;
    if inputs.len() != t.inner.len() {
        return Err(TangleError::InputCount);
    }
    let mut out = GrElement::zero(ctx);
    for (input, disk) in inputs.iter().zip(&t.inner) {
        if input.is_zero() {
            return Ok(out);
        }
        match input.homogeneous_degree() {
            None => return Err(TangleError::InputNotHomogeneous),
            Some(d) if d != disk.points => return Err(TangleError::DegreeMismatch),
            _ => {}
        }
    }

    // strand id at each boundary point
    let disks = t.disk_count();
    let mut strand_at: Vec<Vec<usize>> = (0..disks).map(|id| vec![usize::MAX; t.disk(id).points]).collect();
    for (s, &(a, b)) in t.strands.iter().enumerate() {
        strand_at[a.disk][a.point] = s;
        strand_at[b.disk][b.point] = s;
    }
    // Strands not touching any inner disk keep a free letter.
    let mut free: Vec<usize> = Vec::new();
    for (s, &(a, b)) in t.strands.iter().enumerate() {
        if a.disk == 0 && b.disk == 0 {
            free.push(s);
        }
    }

    let l = ctx.letters();
    let loop_factor = FieldScalar::delta_pow(ctx.scalars(), t.loops as i64);
    let term_lists: Vec<Vec<(&Word, &FieldScalar)>> =
        inputs.iter().map(|e| e.terms().collect()).collect();

    let mut letters = vec![0u8; t.strands.len()];
    let mut combo = vec![0usize; inputs.len()];
    'combos: loop {
        letters.iter_mut().for_each(|x| *x = 0);
        let mut coeff = loop_factor.clone();
        let mut consistent = true;
        'disks: for (d, &term_idx) in combo.iter().enumerate() {
            let (word, c) = term_lists[d][term_idx];
            let disk = &t.inner[d];
            for (pos, &letter) in word.letters().iter().enumerate() {
                let point = (disk.star + pos) % disk.points.max(1);
                let s = strand_at[d + 1][point];
                if letters[s] == 0 {
                    letters[s] = letter;
                } else if letters[s] != letter {
                    consistent = false;
                    break 'disks;
                }
            }
            coeff *= c;
        }
        if consistent {
            // Sum the free outer-to-outer strands over all letters.
            let mut free_assign = vec![1u8; free.len()];
            loop {
                for (k, &s) in free.iter().enumerate() {
                    letters[s] = free_assign[k];
                }
                let n0 = t.outer.points;
                let mut word = Vec::with_capacity(n0);
                for pos in 0..n0 {
                    let point = (t.outer.star + pos) % n0;
                    word.push(letters[strand_at[0][point]]);
                }
                out.add_term(Word::new(word), coeff.clone());
                // next free assignment
                let mut k = 0;
                loop {
                    if k == free.len() {
                        break;
                    }
                    if free_assign[k] < l {
                        free_assign[k] += 1;
                        break;
                    }
                    free_assign[k] = 1;
                    k += 1;
                }
                if k == free.len() {
                    break;
                }
            }
        }
        // next term combination
        let mut d = 0;
        loop {
            if d == combo.len() {
                break 'combos;
            }
            combo[d] += 1;
            if combo[d] < term_lists[d].len() {
                break;
            }
            combo[d] = 0;
            d += 1;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// The k-contraction component of the ⋆ product of P_n ⊗ P_m: the last k
/// strands of the first box bend into the first k strands of the second.
/// Summing evaluations over k = 0..=min(n,m) reproduces ⋆.
pub fn star_tangle(n: usize, m: usize, k: usize) -> Tangle {
    assert!(k <= n.min(m), "contraction count exceeds arity");
    let mut strands = Vec::new();
    for s in 0..k {
        strands.push((ep(1, n - 1 - s), ep(2, s)));
    }
    for p in 0..n - k {
        strands.push((ep(1, p), ep(0, p)));
    }
    for q in k..m {
        strands.push((ep(2, q), ep(0, n - k + (q - k))));
    }
    Tangle::new(
        Disk { points: n + m - 2 * k, star: 0 },
        vec![Disk { points: n, star: 0 }, Disk { points: m, star: 0 }],
        strands,
        0,
    )
}

/// All contraction components of ⋆ on P_n ⊗ P_m.
pub fn star_tangles(n: usize, m: usize) -> Vec<Tangle> {
    (0..=n.min(m)).map(|k| star_tangle(n, m, k)).collect()
}

/// The • product tangle: boxes side by side, no contraction.
pub fn bullet_tangle(n: usize, m: usize) -> Tangle {
    star_tangle(n, m, 0)
}

/// The cup: single strand between two outer points.
pub fn cup_tangle() -> Tangle {
    Tangle::new(
        Disk { points: 2, star: 0 },
        Vec::new(),
        vec![(ep(0, 0), ep(0, 1))],
        0,
    )
}

/// Cap joining the first two boundary points of an n-box.
pub fn cap_left_tangle(n: usize) -> Tangle {
    assert!(n >= 2);
    let mut strands = vec![(ep(1, 0), ep(1, 1))];
    for p in 2..n {
        strands.push((ep(1, p), ep(0, p - 2)));
    }
    Tangle::new(
        Disk { points: n - 2, star: 0 },
        vec![Disk { points: n, star: 0 }],
        strands,
        0,
    )
}

/// Cap joining the last two boundary points of an n-box.
pub fn cap_right_tangle(n: usize) -> Tangle {
    assert!(n >= 2);
    let mut strands = vec![(ep(1, n - 2), ep(1, n - 1))];
    for p in 0..n - 2 {
        strands.push((ep(1, p), ep(0, p)));
    }
    Tangle::new(
        Disk { points: n - 2, star: 0 },
        vec![Disk { points: n, star: 0 }],
        strands,
        0,
    )
}

/// The inner-product tangle: ⟨a, b⟩·1 = evaluate(pairing, a, b*). Boundary
/// points of the two boxes are joined straight across.
pub fn pairing_tangle(n: usize) -> Tangle {
    let strands = (0..n).map(|p| (ep(1, p), ep(2, n - 1 - p))).collect();
    Tangle::new(
        Disk { points: 0, star: 0 },
        vec![Disk { points: n, star: 0 }, Disk { points: n, star: 0 }],
        strands,
        0,
    )
}

/// Trace closure of a 2q-box: nested strands pair point p with point n−1−p.
/// On the matrix picture of (P_{2q}, ×) this is the matrix trace.
pub fn trace_tangle(n: usize) -> Tangle {
    assert!(n.is_multiple_of(2), "trace closure needs an even box");
    let strands = (0..n / 2).map(|p| (ep(1, p), ep(1, n - 1 - p))).collect();
    Tangle::new(Disk { points: 0, star: 0 }, vec![Disk { points: n, star: 0 }], strands, 0)
}

/// Rotation by one strand: inner point p feeds outer point p+1 (mod n), the
/// last strand wrapping around the box. Plumbing for convention tests.
pub fn rotation_tangle(n: usize) -> Tangle {
    let strands = (0..n).map(|p| (ep(1, p), ep(0, (p + 1) % n))).collect();
    Tangle::new(Disk { points: n, star: 0 }, vec![Disk { points: n, star: 0 }], strands, 0)
}

/// Identity tangle on n strands.
pub fn identity_tangle(n: usize) -> Tangle {
    let strands = (0..n).map(|p| (ep(1, p), ep(0, p))).collect();
    Tangle::new(Disk { points: n, star: 0 }, vec![Disk { points: n, star: 0 }], strands, 0)
}

/// The α_j tangle: partially pairs an n-box with its involuted copy, leaving
/// 2j free strands. `side` selects which end of the box is contracted; the
/// two choices are planar reflections of each other.
pub fn alpha_tangle(n: usize, j: usize, side: PairSide) -> Tangle {
    assert!(j <= n);
    let mut strands = Vec::new();
    match side {
        PairSide::Tail => {
            for p in j..n {
                strands.push((ep(1, p), ep(2, n - 1 - p)));
            }
            for s in 0..j {
                strands.push((ep(1, s), ep(0, s)));
            }
            for s in 0..j {
                strands.push((ep(2, n - j + s), ep(0, j + s)));
            }
        }
        PairSide::Head => {
            for p in 0..n - j {
                strands.push((ep(1, p), ep(2, n - 1 - p)));
            }
            for s in 0..j {
                strands.push((ep(2, s), ep(0, s)));
            }
            for s in 0..j {
                strands.push((ep(1, n - j + s), ep(0, j + s)));
            }
        }
    }
    Tangle::new(
        Disk { points: 2 * j, star: 0 },
        vec![Disk { points: n, star: 0 }, Disk { points: n, star: 0 }],
        strands,
        0,
    )
}

/// ⋆ via the tangle engine: sums the contraction components. Cross-validates
/// the direct formula.
pub fn star_by_tangles(a: &GrElement, b: &GrElement, ctx: &Context) -> Result<GrElement, TangleError> {
    if a.is_zero() || b.is_zero() {
        return Ok(GrElement::zero(ctx));
    }
    let n = a.homogeneous_degree().ok_or(TangleError::InputNotHomogeneous)?;
    let m = b.homogeneous_degree().ok_or(TangleError::InputNotHomogeneous)?;
    let mut out = GrElement::zero(ctx);
    for t in star_tangles(n, m) {
        out += &evaluate(&t, &[a.clone(), b.clone()], ctx)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::{times_j, z_vector};
    use crate::sample::{random_homogeneous, SplitMix64};
    use crate::scalars::FieldScalar;

    fn ctx2() -> Context {
        Context::new(2)
    }

    #[test]
    fn builders_validate() {
        assert!(cup_tangle().is_valid());
        assert!(pairing_tangle(3).is_valid());
        assert!(trace_tangle(6).is_valid());
        assert!(rotation_tangle(5).is_valid());
        assert!(identity_tangle(4).is_valid());
        for k in 0..=2 {
            assert!(star_tangle(3, 2, k).is_valid(), "star k={k}");
        }
        for j in 0..=3 {
            assert!(alpha_tangle(3, j, PairSide::Tail).is_valid());
            assert!(alpha_tangle(3, j, PairSide::Head).is_valid());
        }
        assert!(cap_left_tangle(4).is_valid());
        assert!(cap_right_tangle(2).is_valid());
    }

    #[test]
    fn crossing_is_rejected() {
        // 4 outer points matched crosswise forces genus 1.
        let t = Tangle::new(
            Disk { points: 4, star: 0 },
            Vec::new(),
            vec![(ep(0, 0), ep(0, 2)), (ep(0, 1), ep(0, 3))],
            0,
        );
        let err = t.validate().unwrap_err();
        assert!(err.contains("Euler characteristic 0"), "{err}");
        // Nested matching on the same points is planar.
        let nested = Tangle::new(
            Disk { points: 4, star: 0 },
            Vec::new(),
            vec![(ep(0, 0), ep(0, 3)), (ep(0, 1), ep(0, 2))],
            0,
        );
        assert!(nested.is_valid());
    }

    #[test]
    fn matching_must_be_perfect() {
        let t = Tangle::new(
            Disk { points: 2, star: 0 },
            Vec::new(),
            vec![(ep(0, 0), ep(0, 0))],
            0,
        );
        assert!(t.validate().unwrap_err().contains("used twice"));
        let t = Tangle::new(Disk { points: 2, star: 0 }, Vec::new(), Vec::new(), 0);
        assert!(!t.is_valid());
    }

    #[test]
    fn cup_evaluates_to_sum_of_squares() {
        let ctx = ctx2();
        let cup = evaluate(&cup_tangle(), &[], &ctx).unwrap();
        assert_eq!(cup, GrElement::cup(&ctx));
    }

    #[test]
    fn star_tangles_reproduce_star() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(61);
        for _ in 0..100 {
            let n = rng.below(4) as usize;
            let m = rng.below(4) as usize;
            let a = random_homogeneous(&mut rng, &ctx, n, 2);
            let b = random_homogeneous(&mut rng, &ctx, m, 2);
            assert_eq!(star_by_tangles(&a, &b, &ctx).unwrap(), a.star(&b));
        }
    }

    #[test]
    fn bullet_cap_pairing_cross_checks() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(67);
        for _ in 0..100 {
            let n = 2 + rng.below(3) as usize;
            let m = rng.below(3) as usize;
            let a = random_homogeneous(&mut rng, &ctx, n, 3);
            let b = random_homogeneous(&mut rng, &ctx, m, 3);
            assert_eq!(
                evaluate(&bullet_tangle(n, m), &[a.clone(), b.clone()], &ctx).unwrap(),
                a.bullet(&b)
            );
            assert_eq!(
                evaluate(&cap_left_tangle(n), core::slice::from_ref(&a), &ctx).unwrap(),
                a.cap_left().unwrap()
            );
            assert_eq!(
                evaluate(&cap_right_tangle(n), core::slice::from_ref(&a), &ctx).unwrap(),
                a.cap_right().unwrap()
            );
            // ⟨a, c⟩·1 = evaluate(pairing, a, c*)
            let c = random_homogeneous(&mut rng, &ctx, n, 3);
            let pair = evaluate(&pairing_tangle(n), &[a.clone(), c.involution()], &ctx).unwrap();
            assert_eq!(pair, &GrElement::one(&ctx) * &a.inner(&c));
        }
    }

    #[test]
    fn trace_closure_is_matrix_trace() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(71);
        for j in [1usize, 2] {
            for _ in 0..20 {
                let c = random_homogeneous(&mut rng, &ctx, 2 * j, 4);
                let d = random_homogeneous(&mut rng, &ctx, 2 * j, 4);
                let prod = times_j(&c, &d, j).unwrap();
                let closed = evaluate(&trace_tangle(2 * j), &[prod], &ctx).unwrap();
                let mc = crate::ncpoly::MatAlgebra2j::from_element(&c, j).unwrap();
                let md = crate::ncpoly::MatAlgebra2j::from_element(&d, j).unwrap();
                let mp = mc.matrix().mul(md.matrix());
                let mut tr = FieldScalar::zero(ctx.scalars());
                for i in 0..mp.rows() {
                    tr += mp.at(i, i);
                }
                assert_eq!(closed.trace(), tr);
            }
        }
    }

    #[test]
    fn composition_compatibility() {
        let ctx = ctx2();
        // cap ∘ cup closes into a loop worth δ.
        let closed = compose(&cap_left_tangle(2), 1, &cup_tangle()).unwrap();
        assert_eq!(closed.loops, 1);
        assert_eq!(closed.strands.len(), 0);
        let v = evaluate(&closed, &[], &ctx).unwrap();
        assert_eq!(v, &GrElement::one(&ctx) * &ctx.delta_scalar());
        // identity ∘ S = S up to representation
        let s = star_tangle(2, 1, 1);
        let c = compose(&identity_tangle(1), 1, &s).unwrap();
        let mut rng = SplitMix64::new(73);
        for _ in 0..20 {
            let a = random_homogeneous(&mut rng, &ctx, 2, 2);
            let b = random_homogeneous(&mut rng, &ctx, 1, 2);
            assert_eq!(
                evaluate(&c, &[a.clone(), b.clone()], &ctx).unwrap(),
                evaluate(&s, &[a, b], &ctx).unwrap()
            );
        }
    }

    #[test]
    fn compose_matches_eval_of_eval() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(79);
        for _ in 0..50 {
            // T = star_tangle(n, m, k); S glued into disk 1 producing the n.
            let p = 1 + rng.below(2) as usize;
            let q = 1 + rng.below(2) as usize;
            let ks = rng.below((p.min(q) + 1) as u64) as usize;
            let n = p + q - 2 * ks;
            let m = 1 + rng.below(3) as usize;
            let k = rng.below((n.min(m) + 1) as u64) as usize;
            let t = star_tangle(n, m, k);
            let s = star_tangle(p, q, ks);
            let glued = compose(&t, 1, &s).unwrap();
            let a = random_homogeneous(&mut rng, &ctx, p, 2);
            let b = random_homogeneous(&mut rng, &ctx, q, 2);
            let c = random_homogeneous(&mut rng, &ctx, m, 2);
            let inner_val = evaluate(&s, &[a.clone(), b.clone()], &ctx).unwrap();
            let lhs = evaluate(&glued, &[a, b, c.clone()], &ctx).unwrap();
            let rhs = evaluate(&t, &[inner_val, c], &ctx).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn loop_factor_is_delta() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(83);
        let t = star_tangle(2, 2, 1);
        let a = random_homogeneous(&mut rng, &ctx, 2, 3);
        let b = random_homogeneous(&mut rng, &ctx, 2, 3);
        let plain = evaluate(&t, &[a.clone(), b.clone()], &ctx).unwrap();
        let looped = evaluate(&t.with_extra_loops(1), &[a, b], &ctx).unwrap();
        assert_eq!(looped, &plain * &ctx.delta_scalar());
    }

    #[test]
    fn reflection_intertwines_involution() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(89);
        for _ in 0..50 {
            let n = 1 + rng.below(3) as usize;
            let m = 1 + rng.below(3) as usize;
            let k = rng.below((n.min(m) + 1) as u64) as usize;
            let t = star_tangle(n, m, k);
            let r = t.reflect();
            assert!(r.is_valid());
            let a = random_homogeneous(&mut rng, &ctx, n, 2);
            let b = random_homogeneous(&mut rng, &ctx, m, 2);
            let lhs = evaluate(&r, &[a.involution(), b.involution()], &ctx).unwrap();
            let rhs = evaluate(&t, &[a, b], &ctx).unwrap().involution();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rotation_lists_do_not_change_evaluation() {
        let ctx = ctx2();
        let mut t = star_tangle(2, 2, 1);
        let mut rng = SplitMix64::new(97);
        let a = random_homogeneous(&mut rng, &ctx, 2, 3);
        let b = random_homogeneous(&mut rng, &ctx, 2, 3);
        let base = evaluate(&t, &[a.clone(), b.clone()], &ctx).unwrap();
        // A cyclically shifted rotation list encodes the same embedding.
        t.rotation = Some(vec![vec![1, 0], vec![1, 0], vec![1, 0]]);
        assert!(t.is_valid());
        assert_eq!(evaluate(&t, &[a, b], &ctx).unwrap(), base);
    }

    #[test]
    fn spherical_closures_agree() {
        // The left and right trace closures share the nested matching; the
        // two drawings differ only by an isotopy across the sphere, which the
        // encoding identifies. Both rotation encodings validate and evaluate
        // identically.
        let ctx = ctx2();
        let mut rng = SplitMix64::new(101);
        let n = 4;
        let left = trace_tangle(n);
        let mut right = trace_tangle(n);
        right.rotation = Some(vec![Vec::new(), vec![2, 3, 0, 1]]);
        assert!(left.is_valid());
        assert!(right.is_valid());
        for _ in 0..20 {
            let a = random_homogeneous(&mut rng, &ctx, n, 4);
            assert_eq!(
                evaluate(&left, core::slice::from_ref(&a), &ctx).unwrap(),
                evaluate(&right, &[a], &ctx).unwrap()
            );
        }
    }

    #[test]
    fn z_vector_right_cap_via_tangles() {
        let ctx = ctx2();
        let b = GrElement::letter(&ctx, 1).unwrap();
        let (z, _) = z_vector(&b).unwrap();
        let capped = evaluate(&cap_right_tangle(3), &[z], &ctx).unwrap();
        assert!(capped.is_zero());
    }
}
