//! Finite-dimensional laboratory for subspace packets and fusion frames.
//!
//! A packet is a family of subspaces W_j of R^M given by spanning lists,
//! optionally weighted. With weights it may be a fusion frame: the operator
//! S = Σ_j ω_j² P_j has bounds A, B, and every f decomposes through
//! f_j = ω_j² S⁻¹ P_j f. Without that structure it can still be an
//! information packet: every f splits as f = Σ f_j with f_j ∈ W_j. The
//! canonical gap between the notions is exercised by the span{e₁, e_j}
//! family, whose fusion bounds degrade linearly with the dimension while
//! expansions keep working.

use crate::error::{FrameError, Result};
use crate::rng::SplitMix64;
use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-12;
/// Residual threshold declaring a vector a member of a subspace.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Largest dimension for dense eigensolves in fusion_bounds.
pub const DENSE_EIGEN_LIMIT: usize = 512;
/// Condition-number ceiling for map_packet operators.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Weighted family of subspaces of R^M.
#[derive(Clone, Debug)]
pub struct FinitePacket {
    dim: usize,
    spans: Vec<DMatrix<f64>>,
    bases: Vec<DMatrix<f64>>,
    weights: Option<Vec<f64>>,
}

/// Orthonormal basis of the column space, via SVD with relative rank
/// tolerance. Returns None for a zero matrix.
fn column_space_basis(span: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let svd = span.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let sigma = &svd.singular_values;
    let top = sigma.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let rank = sigma.iter().filter(|&&s| s > RANK_TOL * top).count();
    if rank == 0 {
        return None;
    }
    Some(u.columns(0, rank).into_owned())
}

impl FinitePacket {
    /// Packet from spanning matrices, one per subspace, vectors as columns.
    pub fn from_spans(dim: usize, spans: Vec<DMatrix<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(FrameError::invalid("dim", "ambient dimension must be positive"));
        }
        if spans.is_empty() {
            return Err(FrameError::invalid("subspaces", "at least one subspace required"));
        }
        let mut bases = Vec::with_capacity(spans.len());
        for (j, span) in spans.iter().enumerate() {
            if span.ncols() == 0 {
                return Err(FrameError::invalid(
                    "subspaces",
                    format!("subspace {j} has an empty spanning list"),
                ));
            }
            if span.nrows() != dim {
                return Err(FrameError::invalid(
                    "subspaces",
                    format!(
                        "subspace {j} vectors live in dimension {}, expected {dim}",
                        span.nrows()
                    ),
                ));
            }
            if span.iter().any(|v| !v.is_finite()) {
                return Err(FrameError::invalid(
                    "subspaces",
                    format!("subspace {j} contains a non-finite entry"),
                ));
            }
            match column_space_basis(span) {
                Some(basis) => bases.push(basis),
                None => {
                    return Err(FrameError::invalid(
                        "subspaces",
                        format!("subspace {j} spans only the zero vector"),
                    ));
                }
            }
        }
        Ok(FinitePacket {
            dim,
            spans,
            bases,
            weights: None,
        })
    }

    /// Convenience constructor from nested vectors (one inner list of
    /// vectors per subspace).
    pub fn from_vectors(dim: usize, subspaces: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let mut spans = Vec::with_capacity(subspaces.len());
        for (j, list) in subspaces.into_iter().enumerate() {
            if list.is_empty() {
                return Err(FrameError::invalid(
                    "subspaces",
                    format!("subspace {j} has an empty spanning list"),
                ));
            }
            if list.iter().any(|v| v.len() != dim) {
                return Err(FrameError::invalid(
                    "subspaces",
                    format!("subspace {j} has a vector of the wrong length"),
                ));
            }
            let cols: Vec<DVector<f64>> = list.into_iter().map(DVector::from_vec).collect();
            spans.push(DMatrix::from_columns(&cols));
        }
        Self::from_spans(dim, spans)
    }

    /// Plain-text format: one vector per line, whitespace-separated reals,
    /// a blank line between subspaces. Lines starting with '#' are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut subspaces: Vec<Vec<Vec<f64>>> = Vec::new();
        let mut current: Vec<Vec<f64>> = Vec::new();
        let mut dim: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.starts_with('#') {
                continue;
            }
            if trimmed.is_empty() {
                if !current.is_empty() {
                    subspaces.push(std::mem::take(&mut current));
                }
                continue;
            }
            let mut vector = Vec::new();
            for tok in trimmed.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| FrameError::Parse {
                    line,
                    reason: format!("cannot read '{tok}' as a real number"),
                })?;
                vector.push(v);
            }
            match dim {
                None => dim = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(FrameError::Parse {
                        line,
                        reason: format!("vector has {} entries, expected {d}", vector.len()),
                    });
                }
                _ => {}
            }
            current.push(vector);
        }
        if !current.is_empty() {
            subspaces.push(current);
        }
        let dim = dim.ok_or(FrameError::Parse {
            line: 0,
            reason: "no vectors found".into(),
        })?;
        Self::from_vectors(dim, subspaces)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.spans.len() {
            return Err(FrameError::invalid(
                "weights",
                format!(
                    "{} weights for {} subspaces",
                    weights.len(),
                    self.spans.len()
                ),
            ));
        }
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(FrameError::invalid(
                "weights",
                "weights must be strictly positive",
            ));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn span(&self, j: usize) -> &DMatrix<f64> {
        &self.spans[j]
    }

    /// Orthonormal basis of subspace j, columns orthonormal.
    pub fn basis(&self, j: usize) -> &DMatrix<f64> {
        &self.bases[j]
    }

    pub fn subspace_dim(&self, j: usize) -> usize {
        self.bases[j].ncols()
    }

    /// Orthogonal projection matrix P_j = Q Qᵀ.
    pub fn projection(&self, j: usize) -> DMatrix<f64> {
        let q = &self.bases[j];
        q * q.transpose()
    }

    /// P_j f without forming the projection matrix.
    pub fn project(&self, j: usize, f: &DVector<f64>) -> DVector<f64> {
        let q = &self.bases[j];
        q * (q.transpose() * f)
    }

    /// Distance from f to subspace j.
    pub fn membership_residual(&self, j: usize, f: &DVector<f64>) -> f64 {
        (f - self.project(j, f)).norm()
    }

    fn require_weights(&self) -> Result<&[f64]> {
        self.weights.as_deref().ok_or_else(|| {
            FrameError::invalid("weights", "operation needs a weighted packet")
        })
    }

    /// S f = Σ ω_j² P_j f, applied through the bases.
    fn apply_s(&self, weights: &[f64], f: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for (j, &w) in weights.iter().enumerate() {
            out += self.project(j, f) * (w * w);
        }
        out
    }

    fn assemble_s(&self, weights: &[f64]) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for (j, &w) in weights.iter().enumerate() {
            s += self.projection(j) * (w * w);
        }
        s
    }
}

/// One component per subspace and the defect of their sum.
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    pub components: Vec<DVector<f64>>,
    pub residual_norm: f64,
}

impl ExpansionResult {
    /// Distance of each component from its subspace. Zero (to tolerance)
    /// for coefficient-built expansions; operator-inverted decompositions
    /// land in S⁻¹(W_j) instead, so membership may genuinely fail there.
    pub fn membership_residuals(&self, packet: &FinitePacket) -> Vec<f64> {
        self.components
            .iter()
            .enumerate()
            .map(|(j, fj)| packet.membership_residual(j, fj))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsMethod {
    DenseEigen,
    RayleighSampling { trials: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct FusionBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundsMethod,
}

/// Extreme eigenvalues of S = Σ ω_j² P_j: exact dense solve in small
/// dimensions, Rayleigh-quotient sampling (inner estimates) above.
pub fn fusion_bounds(packet: &FinitePacket, trials: usize, seed: u64) -> Result<FusionBounds> {
    let weights = packet.require_weights()?;
    if packet.dim <= DENSE_EIGEN_LIMIT {
        let s = packet.assemble_s(weights);
        let eigen = s.symmetric_eigen();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in eigen.eigenvalues.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        return Ok(FusionBounds {
            lower: lo.max(0.0), // S is positive semidefinite; clamp fp noise
            upper: hi,
            method: BoundsMethod::DenseEigen,
        });
    }
    if trials == 0 {
        return Err(FrameError::invalid("trials", "need at least one trial"));
    }
    let mut rng = SplitMix64::new(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..trials {
        let v = DVector::from_fn(packet.dim, |_, _| rng.standard_normal());
        let n2 = v.norm_squared();
        if n2 == 0.0 {
            continue;
        }
        let q = packet.apply_s(weights, &v).dot(&v) / n2;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok(FusionBounds {
        lower: lo,
        upper: hi,
        method: BoundsMethod::RayleighSampling { trials },
    })
}

/// f_j = ω_j² S⁻¹ P_j f. The components sum to f whenever S is invertible;
/// they live in S⁻¹(W_j), not W_j.
pub fn fusion_decompose(packet: &FinitePacket, f: &DVector<f64>) -> Result<ExpansionResult> {
    let weights = packet.require_weights()?;
    if f.len() != packet.dim {
        return Err(FrameError::invalid(
            "f",
            format!("vector length {}, ambient dimension {}", f.len(), packet.dim),
        ));
    }
    let s = packet.assemble_s(weights);
    let chol = s.cholesky().ok_or_else(|| {
        FrameError::NotAFusionFrame(
            "frame operator is singular: the subspaces do not span".into(),
        )
    })?;
    let components: Vec<DVector<f64>> = weights
        .iter()
        .enumerate()
        .map(|(j, &w)| chol.solve(&packet.project(j, f)) * (w * w))
        .collect();
    let mut sum = DVector::zeros(packet.dim);
    for c in &components {
        sum += c;
    }
    Ok(ExpansionResult {
        residual_norm: (f - sum).norm(),
        components,
    })
}

/// Split f as Σ f_j with f_j ∈ W_j via the minimal-norm coefficients on the
/// stacked spanning vectors.
pub fn expand_in_packet(packet: &FinitePacket, f: &DVector<f64>) -> Result<ExpansionResult> {
    if f.len() != packet.dim {
        return Err(FrameError::invalid(
            "f",
            format!("vector length {}, ambient dimension {}", f.len(), packet.dim),
        ));
    }
    let total: usize = packet.spans.iter().map(|s| s.ncols()).sum();
    let mut stacked = DMatrix::zeros(packet.dim, total);
    let mut col = 0;
    for span in &packet.spans {
        stacked.view_mut((0, col), (packet.dim, span.ncols())).copy_from(span);
        col += span.ncols();
    }
    let svd = stacked.clone().svd(true, true);
    let coeffs = svd
        .solve(f, RANK_TOL)
        .map_err(|e| FrameError::invalid("f", e.to_string()))?;
    let fnorm = f.norm();
    let residual = (&stacked * &coeffs - f).norm();
    if residual > MEMBERSHIP_TOL * fnorm.max(1.0) {
        return Err(FrameError::NotAnInformationPacket(format!(
            "no expansion: the subspaces span a proper subspace \
             (residual {residual:.3e} for |f| = {fnorm:.3e})"
        )));
    }
    let mut components = Vec::with_capacity(packet.spans.len());
    let mut col = 0;
    for span in &packet.spans {
        let k = span.ncols();
        let mut fj = DVector::zeros(packet.dim);
        for c in 0..k {
            fj += span.column(c) * coeffs[col + c];
        }
        col += k;
        components.push(fj);
    }
    let mut sum = DVector::zeros(packet.dim);
    for c in &components {
        sum += c;
    }
    Ok(ExpansionResult {
        residual_norm: (f - sum).norm(),
        components,
    })
}

/// Group frame vectors into subspaces W_j = span{f_k : k ∈ cover_j}. The
/// cover sets may overlap but must jointly reach every index.
pub fn packet_from_frame(
    frame_vectors: &[DVector<f64>],
    cover: &[Vec<usize>],
) -> Result<FinitePacket> {
    if frame_vectors.is_empty() {
        return Err(FrameError::invalid("frame_vectors", "no vectors given"));
    }
    let dim = frame_vectors[0].len();
    if frame_vectors.iter().any(|v| v.len() != dim) {
        return Err(FrameError::invalid(
            "frame_vectors",
            "vectors have mixed lengths",
        ));
    }
    if cover.is_empty() {
        return Err(FrameError::invalid("cover", "no index sets given"));
    }
    let mut hit = vec![false; frame_vectors.len()];
    for (j, set) in cover.iter().enumerate() {
        if set.is_empty() {
            return Err(FrameError::invalid(
                "cover",
                format!("index set {j} is empty"),
            ));
        }
        for &k in set {
            if k >= frame_vectors.len() {
                return Err(FrameError::invalid(
                    "cover",
                    format!("index {k} out of range in set {j}"),
                ));
            }
            hit[k] = true;
        }
    }
    if let Some(missed) = hit.iter().position(|&h| !h) {
        return Err(FrameError::invalid(
            "cover",
            format!("index {missed} is not covered"),
        ));
    }
    let spans = cover
        .iter()
        .map(|set| {
            let cols: Vec<DVector<f64>> =
                set.iter().map(|&k| frame_vectors[k].clone()).collect();
            DMatrix::from_columns(&cols)
        })
        .collect();
    FinitePacket::from_spans(dim, spans)
}

/// Image packet {T(W_j)} under an invertible operator. Weights carry over.
pub fn map_packet(packet: &FinitePacket, t: &DMatrix<f64>) -> Result<FinitePacket> {
    if t.nrows() != packet.dim || t.ncols() != packet.dim {
        return Err(FrameError::invalid(
            "t",
            format!(
                "operator is {}x{}, ambient dimension {}",
                t.nrows(),
                t.ncols(),
                packet.dim
            ),
        ));
    }
    let sigma = t.clone().svd(false, false).singular_values;
    let (mut s_min, mut s_max) = (f64::INFINITY, 0.0f64);
    for &s in sigma.iter() {
        s_min = s_min.min(s);
        s_max = s_max.max(s);
    }
    if s_min <= 0.0 || s_max / s_min >= CONDITION_LIMIT {
        return Err(FrameError::invalid(
            "t",
            format!(
                "operator numerically singular (condition {:.3e})",
                if s_min > 0.0 { s_max / s_min } else { f64::INFINITY }
            ),
        ));
    }
    let spans = packet.spans.iter().map(|span| t * span).collect();
    let mapped = FinitePacket::from_spans(packet.dim, spans)?;
    match &packet.weights {
        Some(w) => mapped.with_weights(w.clone()),
        None => Ok(mapped),
    }
}

/// Replace each W_j by a superset U_j ⊇ W_j; containment is verified by
/// projecting the old bases onto the new subspaces.
pub fn enlarge_packet(
    packet: &FinitePacket,
    supersets: Vec<DMatrix<f64>>,
) -> Result<FinitePacket> {
    if supersets.len() != packet.len() {
        return Err(FrameError::invalid(
            "supersets",
            format!("{} supersets for {} subspaces", supersets.len(), packet.len()),
        ));
    }
    let enlarged = FinitePacket::from_spans(packet.dim, supersets)?;
    for j in 0..packet.len() {
        let old = packet.basis(j);
        for c in 0..old.ncols() {
            let q = old.column(c).into_owned();
            let r = enlarged.membership_residual(j, &q);
            if r > MEMBERSHIP_TOL {
                return Err(FrameError::invalid(
                    "supersets",
                    format!("superset {j} does not contain the original subspace (residual {r:.3e})"),
                ));
            }
        }
    }
    match &packet.weights {
        Some(w) => enlarged.with_weights(w.clone()),
        None => Ok(enlarged),
    }
}

/// The family W_j = span{e₁, e_j}, j = 1..M, with unit weights: every
/// subspace contains e₁, so the fusion bounds spread to (1, M) while
/// expansions remain trivially available.
pub fn counterexample_packet(m: usize) -> Result<FinitePacket> {
    if m < 2 {
        return Err(FrameError::invalid("m", "need dimension at least 2"));
    }
    let mut spans = Vec::with_capacity(m);
    for j in 0..m {
        let mut e1 = DVector::zeros(m);
        e1[0] = 1.0;
        if j == 0 {
            spans.push(DMatrix::from_columns(&[e1]));
        } else {
            let mut ej = DVector::zeros(m);
            ej[j] = 1.0;
            spans.push(DMatrix::from_columns(&[e1, ej]));
        }
    }
    FinitePacket::from_spans(m, spans)?.with_weights(vec![1.0; m])
}

/// Projection-mass growth of the counterexample: Σ_j |P_j e₁|² against
/// Σ_j |P_j e_k|², computed from the assembled packet, plus their ratio.
pub fn counterexample_growth(m: usize) -> Result<(f64, f64, f64)> {
    let packet = counterexample_packet(m)?;
    let mut e1 = DVector::zeros(m);
    e1[0] = 1.0;
    let mut ek = DVector::zeros(m);
    ek[m - 1] = 1.0;
    let mass = |f: &DVector<f64>| -> f64 {
        (0..packet.len())
            .map(|j| packet.project(j, f).norm_squared())
            .sum()
    };
    let at_e1 = mass(&e1);
    let at_ek = mass(&ek);
    Ok((at_e1, at_ek, at_e1 / at_ek))
}
