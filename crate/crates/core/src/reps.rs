//! Finite-dimensional unital representations, the distance
//! `d_K(π, π') = max_{a in K} ‖π(a) − π'(a)‖`, and the *-homomorphism
//! machinery whose pullbacks are isometric embeddings of representation
//! spaces.
//!
//! A representation is stored in coordinates: a multiplicity per block plus a
//! single conjugating unitary. Evaluation assembles the block-diagonal model
//! operator and conjugates it. Because the generating sets are finite, every
//! supremum in sight is an exact maximum; the only numerical error in a
//! distance is the operator-norm computation itself.

use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::algebra::{AlgebraElement, FdAlgebra, GeneratingSet, DEFAULT_GENERATION_WORD_LEN};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Unitary};
use crate::par;

/// A unital representation of an [`FdAlgebra`] on a fixed ambient space:
/// block `i` appears with multiplicity `mᵢ`, and the whole block-diagonal
/// picture is rotated by one conjugating unitary.
#[derive(Debug, Clone)]
pub struct Representation {
    algebra: FdAlgebra,
    multiplicities: Vec<usize>,
    ambient_dim: usize,
    conjugator: Unitary,
}

impl Representation {
    pub fn new(
        algebra: FdAlgebra,
        multiplicities: Vec<usize>,
        conjugator: Unitary,
    ) -> Result<Self> {
        if multiplicities.len() != algebra.num_blocks() {
            return Err(Error::invalid(format!(
                "expected {} multiplicities, got {}",
                algebra.num_blocks(),
                multiplicities.len()
            )));
        }
        if multiplicities.iter().all(|&m| m == 0) {
            return Err(Error::invalid("at least one multiplicity must be positive"));
        }
        let ambient_dim: usize = multiplicities
            .iter()
            .zip(algebra.block_dims())
            .map(|(&m, &n)| m * n)
            .sum();
        if conjugator.dim() != ambient_dim {
            return Err(Error::invalid(format!(
                "conjugator dimension {} does not match ambient dimension {ambient_dim}",
                conjugator.dim()
            )));
        }
        Ok(Representation { algebra, multiplicities, ambient_dim, conjugator })
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn conjugator(&self) -> &Unitary {
        &self.conjugator
    }

    /// The same representation conjugated by a further unitary.
    pub fn conjugated_by(&self, u: &Unitary) -> Result<Self> {
        if u.dim() != self.ambient_dim {
            return Err(Error::AmbientMismatch { left: u.dim(), right: self.ambient_dim });
        }
        Ok(Representation {
            algebra: self.algebra.clone(),
            multiplicities: self.multiplicities.clone(),
            ambient_dim: self.ambient_dim,
            conjugator: u.compose(&self.conjugator),
        })
    }
}

/// The block-diagonal operator `⊕ᵢ mᵢ ⊙ xᵢ` in the canonical layout
/// (blocks in algebra order, copies of a block adjacent).
fn assemble(algebra: &FdAlgebra, multiplicities: &[usize], ambient: usize, x: &AlgebraElement) -> ComplexMatrix {
    let mut d = ComplexMatrix::zeros(ambient);
    let mut off = 0;
    for (i, &m) in multiplicities.iter().enumerate() {
        let n = algebra.block_dims()[i];
        for _ in 0..m {
            for r in 0..n {
                for c in 0..n {
                    d.set(off + r, off + c, x.block(i).at(r, c));
                }
            }
            off += n;
        }
    }
    d
}

/// Evaluates the representation on an element.
pub fn eval_rep(pi: &Representation, x: &AlgebraElement) -> Result<ComplexMatrix> {
    if x.algebra() != pi.algebra() {
        return Err(Error::algebra_mismatch(
            "element and representation algebras differ".to_string(),
        ));
    }
    let d = assemble(&pi.algebra, &pi.multiplicities, pi.ambient_dim, x);
    Ok(pi.conjugator.conjugate(&d))
}

/// `d_K(π, π')`: exact maximum over the finite set `K` of operator-norm
/// deviations. Symmetric by construction; zero iff the two representations
/// agree on every element of `K`.
pub fn rep_distance(
    pi1: &Representation,
    pi2: &Representation,
    k: &GeneratingSet,
) -> Result<f64> {
    if pi1.algebra() != pi2.algebra() {
        return Err(Error::algebra_mismatch(
            "representations live over different algebras".to_string(),
        ));
    }
    if k.algebra() != pi1.algebra() {
        return Err(Error::algebra_mismatch(
            "generating set belongs to a different algebra".to_string(),
        ));
    }
    if pi1.ambient_dim() != pi2.ambient_dim() {
        return Err(Error::AmbientMismatch { left: pi1.ambient_dim(), right: pi2.ambient_dim() });
    }
    let mut best: f64 = 0.0;
    for a in k.elements() {
        let dev = eval_rep(pi1, a)?.sub(&eval_rep(pi2, a)?);
        best = best.max(linalg::op_norm(&dev)?);
    }
    Ok(best)
}

/// One canonical irreducible representation per block: multiplicity one on
/// that block, zero elsewhere, identity conjugator.
pub fn enumerate_irreps(algebra: &FdAlgebra) -> Vec<Representation> {
    (0..algebra.num_blocks())
        .map(|i| {
            let mut mult = vec![0; algebra.num_blocks()];
            mult[i] = 1;
            let dim = algebra.block_dims()[i];
            Representation {
                algebra: algebra.clone(),
                multiplicities: mult,
                ambient_dim: dim,
                conjugator: Unitary::identity(dim),
            }
        })
        .collect()
}

/// A unital *-homomorphism between two finite-dimensional algebras, in
/// coordinates: target block `j` contains `c_{ji}` copies of source block
/// `i`, arranged block-diagonally and conjugated by `W_j`.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    source: FdAlgebra,
    target: FdAlgebra,
    multiplicity_matrix: Vec<Vec<usize>>,
    conjugators: Vec<Unitary>,
}

impl Homomorphism {
    pub fn new(
        source: FdAlgebra,
        target: FdAlgebra,
        multiplicity_matrix: Vec<Vec<usize>>,
        conjugators: Vec<Unitary>,
    ) -> Result<Self> {
        if multiplicity_matrix.len() != target.num_blocks() {
            return Err(Error::invalid(format!(
                "multiplicity matrix has {} rows, target has {} blocks",
                multiplicity_matrix.len(),
                target.num_blocks()
            )));
        }
        if conjugators.len() != target.num_blocks() {
            return Err(Error::invalid(format!(
                "expected {} conjugators, got {}",
                target.num_blocks(),
                conjugators.len()
            )));
        }
        for (j, row) in multiplicity_matrix.iter().enumerate() {
            if row.len() != source.num_blocks() {
                return Err(Error::invalid(format!(
                    "row {j} of the multiplicity matrix has {} entries, source has {} blocks",
                    row.len(),
                    source.num_blocks()
                )));
            }
            let filled: usize = row
                .iter()
                .zip(source.block_dims())
                .map(|(&c, &n)| c * n)
                .sum();
            let p = target.block_dims()[j];
            if filled != p {
                return Err(Error::invalid(format!(
                    "target block {j} has dimension {p} but the row fills {filled} (unitality)",
                )));
            }
            if conjugators[j].dim() != p {
                return Err(Error::invalid(format!(
                    "conjugator {j} has dimension {}, target block needs {p}",
                    conjugators[j].dim()
                )));
            }
        }
        Ok(Homomorphism { source, target, multiplicity_matrix, conjugators })
    }

    pub fn identity(algebra: &FdAlgebra) -> Self {
        let k = algebra.num_blocks();
        let mut matrix = vec![vec![0; k]; k];
        let mut conjugators = Vec::with_capacity(k);
        for (j, &n) in algebra.block_dims().iter().enumerate() {
            matrix[j][j] = 1;
            conjugators.push(Unitary::identity(n));
        }
        Homomorphism {
            source: algebra.clone(),
            target: algebra.clone(),
            multiplicity_matrix: matrix,
            conjugators,
        }
    }

    pub fn source(&self) -> &FdAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FdAlgebra {
        &self.target
    }

    pub fn multiplicity_matrix(&self) -> &[Vec<usize>] {
        &self.multiplicity_matrix
    }

    pub fn conjugators(&self) -> &[Unitary] {
        &self.conjugators
    }
}

/// Applies the homomorphism to an element.
pub fn hom_apply(alpha: &Homomorphism, x: &AlgebraElement) -> Result<AlgebraElement> {
    if x.algebra() != &alpha.source {
        return Err(Error::algebra_mismatch(
            "element does not belong to the homomorphism's source".to_string(),
        ));
    }
    let mut blocks = Vec::with_capacity(alpha.target.num_blocks());
    for (j, row) in alpha.multiplicity_matrix.iter().enumerate() {
        let p = alpha.target.block_dims()[j];
        let d = assemble(&alpha.source, row, p, x);
        blocks.push(alpha.conjugators[j].conjugate(&d));
    }
    AlgebraElement::new(alpha.target.clone(), blocks)
}

/// Pulls a representation of the target back along the homomorphism:
/// `(α*ρ)(x) = ρ(α(x))`, realised again in (multiplicities, conjugator)
/// coordinates so that no evaluation detour through the target is needed.
///
/// The pulled-back conjugator is `V · Ŵ · P` where `V` is ρ's conjugator,
/// `Ŵ` repeats each block conjugator `W_j` once per ρ-copy of block `j`, and
/// `P` is the permutation aligning the canonical source layout (copies of a
/// block adjacent) with the nested layout (source copies grouped inside
/// target copies). Conjugating the canonical `⊕ᵢ mᵢ ⊙ xᵢ` by `P` reproduces
/// the nested picture exactly, entry by entry.
pub fn pullback(alpha: &Homomorphism, rho: &Representation) -> Result<Representation> {
    if rho.algebra() != &alpha.target {
        return Err(Error::algebra_mismatch(
            "representation does not act on the homomorphism's target".to_string(),
        ));
    }
    let k_s = alpha.source.num_blocks();
    let k_t = alpha.target.num_blocks();
    let source_dims = alpha.source.block_dims();
    let ambient = rho.ambient_dim();

    let mut multiplicities = vec![0usize; k_s];
    for (j, row) in alpha.multiplicity_matrix.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            multiplicities[i] += rho.multiplicities()[j] * c;
        }
    }

    // W-hat: block conjugators repeated along rho's copies.
    let mut what = ComplexMatrix::zeros(ambient);
    let mut off = 0;
    for j in 0..k_t {
        let p = alpha.target.block_dims()[j];
        for _ in 0..rho.multiplicities()[j] {
            let w = alpha.conjugators[j].matrix();
            for r in 0..p {
                for c in 0..p {
                    what.set(off + r, off + c, w.at(r, c));
                }
            }
            off += p;
        }
    }

    // Permutation sending the canonical layout position of each source-block
    // copy to its nested position.
    let mut base = vec![0usize; k_s];
    let mut acc = 0;
    for i in 0..k_s {
        base[i] = acc;
        acc += multiplicities[i] * source_dims[i];
    }
    debug_assert_eq!(acc, ambient);
    let mut perm = ComplexMatrix::zeros(ambient);
    let mut next_copy = vec![0usize; k_s];
    let mut nested_pos = 0;
    for (j, row) in alpha.multiplicity_matrix.iter().enumerate() {
        for _ in 0..rho.multiplicities()[j] {
            for (i, &c_ji) in row.iter().enumerate() {
                for _ in 0..c_ji {
                    let copy_index = next_copy[i];
                    next_copy[i] += 1;
                    for t in 0..source_dims[i] {
                        let canonical = base[i] + copy_index * source_dims[i] + t;
                        perm.set(nested_pos, canonical, Complex64::ONE);
                        nested_pos += 1;
                    }
                }
            }
        }
    }
    debug_assert_eq!(nested_pos, ambient);

    let conjugator = Unitary::new(
        rho.conjugator().matrix().matmul(&what).matmul(&perm),
    )?;
    Representation::new(alpha.source.clone(), multiplicities, conjugator)
}

/// Image of a generating set under the homomorphism. The result is verified
/// (at the default word length) exactly when the image still generates the
/// target; a non-surjective homomorphism typically loses that property.
pub fn pushforward_set(alpha: &Homomorphism, k: &GeneratingSet) -> Result<GeneratingSet> {
    let elements = k
        .elements()
        .iter()
        .map(|x| hom_apply(alpha, x))
        .collect::<Result<Vec<_>>>()?;
    let mut set = GeneratingSet::new(alpha.target.clone(), elements)?;
    set.verify(DEFAULT_GENERATION_WORD_LEN);
    Ok(set)
}

/// A reproducible batch of representation pairs; the `id` fingerprints the
/// sampling inputs so that downstream moduli can prove they were pooled over
/// one and the same batch.
#[derive(Debug, Clone)]
pub struct RepPairSet {
    algebra: FdAlgebra,
    pairs: Vec<(Representation, Representation)>,
    id: u64,
}

impl RepPairSet {
    pub fn from_pairs(pairs: Vec<(Representation, Representation)>) -> Result<Self> {
        let first = pairs
            .first()
            .ok_or_else(|| Error::EmptySampleSet { context: "no representation pairs".to_string() })?;
        let algebra = first.0.algebra().clone();
        for (a, b) in &pairs {
            if a.algebra() != &algebra || b.algebra() != &algebra {
                return Err(Error::algebra_mismatch(
                    "all pairs must share one algebra".to_string(),
                ));
            }
            if a.ambient_dim() != b.ambient_dim() {
                return Err(Error::AmbientMismatch {
                    left: a.ambient_dim(),
                    right: b.ambient_dim(),
                });
            }
        }
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        algebra.block_dims().hash(&mut hasher);
        pairs.len().hash(&mut hasher);
        for (a, b) in &pairs {
            for rep in [a, b] {
                rep.multiplicities().hash(&mut hasher);
                for z in rep.conjugator().matrix().entries() {
                    z.re.to_bits().hash(&mut hasher);
                    z.im.to_bits().hash(&mut hasher);
                }
            }
        }
        let id = hasher.finish();
        Ok(RepPairSet { algebra, pairs, id })
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn pairs(&self) -> &[(Representation, Representation)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn id(&self) -> u64 {
        self.id
    }
}

/// Samples `count` representation pairs over one base representation with
/// the given multiplicities.
///
/// Even-indexed pairs conjugate the base by two independent Haar unitaries
/// (these realise large distances); odd-indexed pairs use `U` and
/// `U · exp(i·ε·H)` with Gaussian Hermitian `H` (small distances), so the
/// sampled distance range covers both regimes. Per-pair seeds are drawn up
/// front from one ChaCha stream, which makes the output identical with and
/// without the `parallel` feature.
pub fn sample_rep_pairs(
    algebra: &FdAlgebra,
    multiplicities: &[usize],
    count: usize,
    seed: u64,
    perturbation_scale: f64,
) -> Result<RepPairSet> {
    if count == 0 {
        return Err(Error::invalid("sample_rep_pairs needs count >= 1"));
    }
    if !(perturbation_scale.is_finite() && perturbation_scale >= 0.0) {
        return Err(Error::invalid("perturbation_scale must be finite and nonnegative"));
    }
    // Validate multiplicities by constructing a probe representation.
    let ambient: usize = multiplicities
        .iter()
        .zip(algebra.block_dims())
        .map(|(&m, &n)| m * n)
        .sum();
    Representation::new(algebra.clone(), multiplicities.to_vec(), Unitary::identity(ambient))?;

    let mut seeder = ChaCha12Rng::seed_from_u64(seed);
    let pair_seeds: Vec<(u64, u64)> = (0..count)
        .map(|_| (seeder.random::<u64>(), seeder.random::<u64>()))
        .collect();

    let built: Vec<Result<(Representation, Representation)>> =
        par::map_indexed(&pair_seeds, |index, &(s1, s2)| {
            let mut rng1 = ChaCha12Rng::seed_from_u64(s1);
            let u = linalg::haar_from_rng(ambient, &mut rng1);
            let u_prime = if index % 2 == 0 {
                let mut rng2 = ChaCha12Rng::seed_from_u64(s2);
                linalg::haar_from_rng(ambient, &mut rng2)
            } else if perturbation_scale == 0.0 {
                u.clone()
            } else {
                let mut rng2 = ChaCha12Rng::seed_from_u64(s2);
                let h = linalg::gaussian_hermitian(ambient, &mut rng2);
                let rot = linalg::unitary_exp_i_hermitian(&h, perturbation_scale)?;
                u.compose(&rot)
            };
            let left = Representation::new(algebra.clone(), multiplicities.to_vec(), u)?;
            let right = Representation::new(algebra.clone(), multiplicities.to_vec(), u_prime)?;
            Ok((left, right))
        });
    let pairs = built.into_iter().collect::<Result<Vec<_>>>()?;

    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    seed.hash(&mut hasher);
    count.hash(&mut hasher);
    multiplicities.hash(&mut hasher);
    perturbation_scale.to_bits().hash(&mut hasher);
    algebra.block_dims().hash(&mut hasher);
    let id = hasher.finish();

    Ok(RepPairSet { algebra: algebra.clone(), pairs, id })
}
