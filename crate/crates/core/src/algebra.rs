//! Finite-dimensional C*-algebras as explicit direct sums of matrix blocks,
//! together with the word calculus needed to certify that a finite set
//! generates.
//!
//! An algebra is just its block dimension vector; an element is one matrix
//! per block. The C*-norm is the maximum of the block operator norms, which
//! coincides with the supremum over irreducible representations because every
//! irreducible representation of a direct sum of matrix algebras is unitarily
//! equivalent to a block projection.

use num_complex::Complex64;
#[cfg(test)]
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Numerical-rank cutoff for generation checks: singular values below this
/// fraction of the largest are treated as zero. Word Gram matrices condition
/// poorly, hence the generous threshold.
pub const GENERATION_RANK_TOLERANCE: f64 = 1e-8;

/// Word length used when a generation check does not specify one.
pub const DEFAULT_GENERATION_WORD_LEN: usize = 4;

/// MGS acceptance threshold: a candidate joins the span basis only if its
/// orthogonal residual exceeds this fraction of its own norm.
const SPAN_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// A finite-dimensional C*-algebra `M_{n_1} ⊕ … ⊕ M_{n_k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdAlgebra {
    block_dims: Vec<usize>,
}

impl FdAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::invalid("an algebra needs at least one block"));
        }
        if block_dims.iter().any(|&n| n == 0) {
            return Err(Error::invalid("block dimensions must be positive"));
        }
        Ok(FdAlgebra { block_dims })
    }

    /// The commutative algebra ℂ^n of functions on n points.
    pub fn commutative(points: usize) -> Result<Self> {
        FdAlgebra::new(vec![1; points])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    /// Linear dimension Σ nᵢ².
    pub fn dimension(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn unit(&self) -> AlgebraElement {
        let blocks = self
            .block_dims
            .iter()
            .map(|&n| ComplexMatrix::identity(n))
            .collect();
        AlgebraElement { algebra: self.clone(), blocks }
    }

    pub fn zero(&self) -> AlgebraElement {
        let blocks = self.block_dims.iter().map(|&n| ComplexMatrix::zeros(n)).collect();
        AlgebraElement { algebra: self.clone(), blocks }
    }
}

/// An element of an [`FdAlgebra`], stored blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    algebra: FdAlgebra,
    blocks: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn new(algebra: FdAlgebra, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::invalid(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (block, &dim)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            if block.dim() != dim {
                return Err(Error::invalid(format!(
                    "block {i} has dimension {}, algebra expects {dim}",
                    block.dim()
                )));
            }
        }
        Ok(AlgebraElement { algebra, blocks })
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix {
        &self.blocks[i]
    }

    fn zip_with(
        &self,
        other: &AlgebraElement,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    ) -> AlgebraElement {
        assert_eq!(
            self.algebra, other.algebra,
            "algebra mismatch in element arithmetic"
        );
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        AlgebraElement { algebra: self.algebra.clone(), blocks }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        self.zip_with(other, |a, b| a.matmul(b))
    }

    pub fn scale(&self, factor: Complex64) -> AlgebraElement {
        let blocks = self.blocks.iter().map(|b| b.scale(factor)).collect();
        AlgebraElement { algebra: self.algebra.clone(), blocks }
    }

    pub fn adjoint(&self) -> AlgebraElement {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        AlgebraElement { algebra: self.algebra.clone(), blocks }
    }

    /// `x + λ·1`.
    pub fn add_scalar(&self, lambda: Complex64) -> AlgebraElement {
        self.add(&self.algebra.unit().scale(lambda))
    }

    /// Flattens the element into a coordinate vector of length Σ nᵢ²
    /// (blocks concatenated row-major); the embedding used by span ranks.
    pub(crate) fn coordinates(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.algebra.dimension());
        for block in &self.blocks {
            v.extend_from_slice(block.entries());
        }
        v
    }
}

/// Element of a commutative algebra ℂ^n given by its diagonal values.
pub fn diagonal_element(algebra: &FdAlgebra, values: &[Complex64]) -> Result<AlgebraElement> {
    if algebra.block_dims().iter().any(|&n| n != 1) {
        return Err(Error::invalid(
            "diagonal_element needs a commutative algebra (all blocks 1-dimensional)",
        ));
    }
    if values.len() != algebra.num_blocks() {
        return Err(Error::invalid(format!(
            "expected {} diagonal values, got {}",
            algebra.num_blocks(),
            values.len()
        )));
    }
    let blocks = values
        .iter()
        .map(|&v| ComplexMatrix::new(1, vec![v]))
        .collect::<Result<Vec<_>>>()?;
    AlgebraElement::new(algebra.clone(), blocks)
}

/// Random element with standard complex Gaussian block entries.
#[cfg(test)]
pub(crate) fn random_element(algebra: &FdAlgebra, rng: &mut ChaCha12Rng) -> AlgebraElement {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&n| linalg::gaussian_matrix(n, rng))
        .collect();
    AlgebraElement { algebra: algebra.clone(), blocks }
}

/// C*-norm: the maximum operator norm over blocks. For a direct sum of
/// matrix algebras this equals the supremum of `‖π(x)‖` over all irreducible
/// representations π.
pub fn element_norm(x: &AlgebraElement) -> Result<f64> {
    let mut best: f64 = 0.0;
    for block in x.blocks() {
        best = best.max(linalg::op_norm(block)?);
    }
    Ok(best)
}

/// One symbol of a *-word: a generator index, possibly starred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    pub index: usize,
    pub star: bool,
}

/// A formal *-word over a generating set; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn unit() -> Self {
        Word::default()
    }

    pub fn from_indices(letters: &[(usize, bool)]) -> Self {
        Word {
            letters: letters.iter().map(|&(index, star)| Letter { index, star }).collect(),
        }
    }
}

/// A finite subset of an algebra, optionally certified to generate it.
#[derive(Debug, Clone)]
pub struct GeneratingSet {
    algebra: FdAlgebra,
    elements: Vec<AlgebraElement>,
    verified: bool,
}

impl GeneratingSet {
    pub fn new(algebra: FdAlgebra, elements: Vec<AlgebraElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("a generating set needs at least one element"));
        }
        for (i, e) in elements.iter().enumerate() {
            if e.algebra() != &algebra {
                return Err(Error::algebra_mismatch(format!(
                    "element {i} of the generating set belongs to a different algebra"
                )));
            }
        }
        Ok(GeneratingSet { algebra, elements, verified: false })
    }

    pub fn algebra(&self) -> &FdAlgebra {
        &self.algebra
    }

    pub fn elements(&self) -> &[AlgebraElement] {
        &self.elements
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs the generation check and records the outcome on the set.
    pub fn verify(&mut self, max_word_len: usize) -> (bool, usize) {
        let result = verify_generates(self, max_word_len);
        self.verified = result.0;
        result
    }

    /// Largest C*-norm among the elements; the diameter bound for the
    /// induced distance is twice this value.
    pub fn max_norm(&self) -> Result<f64> {
        let mut best: f64 = 0.0;
        for e in &self.elements {
            best = best.max(element_norm(e)?);
        }
        Ok(best)
    }
}

/// Evaluates `Σ coeffs[w] · w(K)` where each word multiplies generators and
/// their adjoints left to right; the empty word contributes the unit.
pub fn star_polynomial(
    words: &[Word],
    coeffs: &[Complex64],
    k: &GeneratingSet,
) -> Result<AlgebraElement> {
    if words.len() != coeffs.len() {
        return Err(Error::invalid(format!(
            "got {} words but {} coefficients",
            words.len(),
            coeffs.len()
        )));
    }
    let mut acc = k.algebra().zero();
    for (word, &coeff) in words.iter().zip(coeffs) {
        let mut value = k.algebra().unit();
        for letter in &word.letters {
            let gen = k
                .elements()
                .get(letter.index)
                .ok_or(Error::BadWord { index: letter.index, available: k.elements().len() })?;
            let factor = if letter.star { gen.adjoint() } else { gen.clone() };
            value = value.mul(&factor);
        }
        acc = acc.add(&value.scale(coeff));
    }
    Ok(acc)
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Modified Gram-Schmidt acceptance: if `v` sticks out of the current span,
/// append its normalised residual and report true. Two orthogonalisation
/// passes keep the basis orthonormal to working precision.
fn mgs_accept(basis: &mut Vec<Vec<Complex64>>, v: &[Complex64]) -> bool {
    let norm0 = l2_norm(v);
    if norm0 == 0.0 {
        return false;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis.iter() {
            let coef = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= coef * bi;
            }
        }
    }
    let res = l2_norm(&w);
    if res > SPAN_RESIDUAL_TOLERANCE * norm0 {
        for wi in &mut w {
            *wi /= res;
        }
        basis.push(w);
        true
    } else {
        false
    }
}

/// Decides whether the *-words of length at most `max_word_len` in
/// `K ∪ {1}` span the whole algebra.
///
/// Returns `(generates, span_dimension)`. The search only extends words that
/// enlarged the span, which is sound: a word lying in the span of shorter
/// words has all its one-letter extensions in the span of their extensions.
/// The reported dimension is the numerical rank (cutoff 1e-8 relative to the
/// top singular value) of the normalised accepted word vectors, not the raw
/// Gram-Schmidt count, so a borderline accept cannot inflate the answer.
pub fn verify_generates(k: &GeneratingSet, max_word_len: usize) -> (bool, usize) {
    let algebra = k.algebra();
    let full_dim = algebra.dimension();
    let mut letters: Vec<AlgebraElement> = Vec::with_capacity(2 * k.elements().len());
    for g in k.elements() {
        letters.push(g.clone());
        letters.push(g.adjoint());
    }

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut kept: Vec<Vec<Complex64>> = Vec::new();
    let unit = algebra.unit();
    let unit_coords = unit.coordinates();
    if mgs_accept(&mut basis, &unit_coords) {
        kept.push(unit_coords);
    }
    let mut frontier = vec![unit];

    for _level in 1..=max_word_len {
        if basis.len() == full_dim {
            break;
        }
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                let extended = w.mul(l);
                let coords = extended.coordinates();
                if mgs_accept(&mut basis, &coords) {
                    kept.push(coords);
                    next.push(extended);
                }
                if basis.len() == full_dim {
                    break;
                }
            }
            if basis.len() == full_dim {
                break;
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    // Rank of the normalised accepted vectors decides the answer.
    let mut cols: Vec<Vec<Complex64>> = kept
        .iter()
        .map(|v| {
            let n = l2_norm(v);
            v.iter().map(|z| z / n).collect()
        })
        .collect();
    let sv = linalg::singular_values_of_columns(&mut cols);
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > GENERATION_RANK_TOLERANCE * top).count();
    (rank == full_dim, rank)
}
