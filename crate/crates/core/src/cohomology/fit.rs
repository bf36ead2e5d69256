//! Least-squares coboundary fits over finite word sets.
//!
//! Whether a two-cocycle restricted to a finitely generated subgroup looks
//! like a coboundary is a linear question: find values a(w) on the words
//! minimizing the residuals of a(g) - a(g h) + a(h) = f(g, h) over scored
//! pairs. A tiny normalized residual is consistent with triviality on that
//! subgroup; a large one certifies that no 1-cochain on the word set bounds
//! f there. No finite computation certifies non-triviality on the full
//! group, so the disk sweeps report rather than assert.

use super::GroupCochain;
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::geom::Point;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::collections::HashMap;

/// Words over a generator set, closed under the pairings it scores: for every
/// scored pair (i, j) the product word is present.
pub struct WordSet {
    words: Vec<GroupElement>,
    labels: Vec<String>,
    /// (left index, right index, product index)
    pairs: Vec<(usize, usize, usize)>,
}

impl WordSet {
    pub fn words(&self) -> &[GroupElement] {
        &self.words
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn pairs(&self) -> &[(usize, usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Build from generators: includes every generator, every pairwise
    /// product, and a random-walk sample of depth-3 words; scores all
    /// generator pairs plus the sampled (generator, pair-product) pairings.
    pub fn random_walk(
        generators: &[GroupElement],
        depth: usize,
        extra_walks: usize,
        rng: &mut impl Rng,
    ) -> Result<WordSet> {
        if generators.len() < 2 {
            return Err(Error::invalid("word sets need at least two generators"));
        }
        if !(2..=3).contains(&depth) {
            return Err(Error::invalid("word-set depth must be 2 or 3"));
        }
        let mut builder = WordSetBuilder::default();
        let gen_ids: Vec<usize> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| builder.intern(g.clone(), format!("g{i}")))
            .collect();
        // all generator pairs
        for (i, &gi) in gen_ids.iter().enumerate() {
            for (j, &gj) in gen_ids.iter().enumerate() {
                builder.score(gi, gj, format!("g{i}g{j}"));
            }
        }
        // random-walk depth-3 pairings: (generator, product of two)
        if depth >= 3 {
            for _ in 0..extra_walks {
                let i = rng.random_range(0..generators.len());
                let j = rng.random_range(0..generators.len());
                let k = rng.random_range(0..generators.len());
                let jk = builder.score(gen_ids[j], gen_ids[k], format!("g{j}g{k}"));
                builder.score(gen_ids[i], jk, format!("g{i}(g{j}g{k})"));
            }
        }
        Ok(builder.finish())
    }
}

#[derive(Default)]
struct WordSetBuilder {
    words: Vec<GroupElement>,
    labels: Vec<String>,
    index: HashMap<u64, usize>,
    pairs: Vec<(usize, usize, usize)>,
    seen_pairs: HashMap<(usize, usize), usize>,
}

impl WordSetBuilder {
    fn intern(&mut self, g: GroupElement, label: String) -> usize {
        let key = g.fingerprint();
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.words.len();
        self.words.push(g);
        self.labels.push(label);
        self.index.insert(key, i);
        i
    }

    /// Record the pairing (i, j), interning the product; returns the product
    /// word index.
    fn score(&mut self, i: usize, j: usize, label: String) -> usize {
        if let Some(&k) = self.seen_pairs.get(&(i, j)) {
            return k;
        }
        let product = self.words[i].compose(&self.words[j]);
        let k = self.intern(product, label);
        self.pairs.push((i, j, k));
        self.seen_pairs.insert((i, j), k);
        k
    }

    fn finish(self) -> WordSet {
        WordSet {
            words: self.words,
            labels: self.labels,
            pairs: self.pairs,
        }
    }
}

/// Outcome of a least-squares coboundary fit.
#[derive(Clone, Debug)]
pub struct CoboundaryFit {
    /// Fitted potential a(w) per word, in word order.
    pub potential: Vec<f64>,
    /// Root-mean-square residual of the fitted equations.
    pub rms_residual: f64,
    /// RMS residual normalized by max(1, RMS of the cocycle values).
    pub normalized_residual: f64,
    /// Numerical rank of the design matrix.
    pub rank: usize,
    /// Null-space dimension of the design matrix.
    pub nullity: usize,
    pub equations: usize,
    pub unknowns: usize,
}

/// Fit a(g_i) - a(g_i g_j) + a(g_j) = f(g_i, g_j) over the scored pairs in
/// least squares, reporting residuals and the rank of the system.
pub fn coboundary_fit(f: &GroupCochain, words: &WordSet) -> Result<CoboundaryFit> {
    if f.degree() != 2 {
        return Err(Error::invalid("coboundary fits apply to degree-2 cochains"));
    }
    if words.pairs().is_empty() {
        return Err(Error::invalid("word set scores no pairs"));
    }
    let rows = words.pairs().len();
    let cols = words.len();
    let mut design = DMatrix::zeros(rows, cols);
    let mut rhs = DVector::zeros(rows);
    for (r, &(i, j, k)) in words.pairs().iter().enumerate() {
        design[(r, i)] += 1.0;
        design[(r, j)] += 1.0;
        design[(r, k)] -= 1.0;
        rhs[r] = f.eval(&[words.words()[i].clone(), words.words()[j].clone()])?;
    }
    let svd = design.clone().svd(true, true);
    let max_singular: f64 = svd.singular_values.max();
    let eps = 1e-10 * max_singular.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let solution = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let residual_vec = &design * &solution - &rhs;
    let rms_residual = (residual_vec.norm_squared() / rows as f64).sqrt();
    let rms_values = (rhs.norm_squared() / rows as f64).sqrt();
    Ok(CoboundaryFit {
        potential: solution.as_slice().to_vec(),
        rms_residual,
        normalized_residual: rms_residual / rms_values.max(1.0),
        rank,
        nullity: cols - rank,
        equations: rows,
        unknowns: cols,
    })
}

/// A synthetic coboundary D b for a cheap 1-cochain b; the standard positive
/// control for the fit.
pub fn synthetic_coboundary(
    b: impl Fn(&GroupElement) -> f64 + Send + Sync + 'static,
) -> GroupCochain {
    GroupCochain::new(2, move |args| {
        let g = &args[0];
        let h = &args[1];
        Ok(b(h) - b(&g.compose(h)) + b(g))
    })
}

/// Where an element sends the origin; a cheap coordinate for building test
/// cochains on translation subgroups.
pub fn displacement(g: &GroupElement, dim: usize) -> Point {
    g.act(&Point::new(vec![0.0; dim]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::CocycleEngine;
    use crate::model::make_r2n;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn generators(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<GroupElement> {
        use rand::Rng;
        (0..count)
            .map(|_| {
                GroupElement::translation((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            })
            .collect()
    }

    #[test]
    fn word_sets_close_under_scored_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let gens = generators(&mut rng, 4, 2);
        let ws = WordSet::random_walk(&gens, 3, 10, &mut rng).unwrap();
        for &(i, j, k) in ws.pairs() {
            let prod = ws.words()[i].compose(&ws.words()[j]);
            assert_eq!(prod.fingerprint(), ws.words()[k].fingerprint());
        }
        // all 16 generator pairs are scored
        assert!(ws.pairs().len() >= 16);
    }

    #[test]
    fn synthetic_coboundary_fits_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let gens = generators(&mut rng, 5, 2);
        let ws = WordSet::random_walk(&gens, 3, 12, &mut rng).unwrap();
        let db = synthetic_coboundary(|g| {
            let p = displacement(g, 2);
            p[0] * p[0] - 0.5 * p[1] + 0.25 * p[0] * p[1]
        });
        let fit = coboundary_fit(&db, &ws).unwrap();
        assert!(
            fit.normalized_residual < 1e-10,
            "residual {}",
            fit.normalized_residual
        );
        // potentials additive in the displacement solve the homogeneous
        // system, so translation word sets are always rank-deficient
        assert!(fit.nullity >= 1);
    }

    #[test]
    fn heisenberg_cocycle_resists_fitting() {
        let engine = Arc::new(CocycleEngine::new(Arc::new(make_r2n(1))));
        let f = engine.cochain();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let gens = generators(&mut rng, 5, 2);
        let ws = WordSet::random_walk(&gens, 3, 12, &mut rng).unwrap();
        let fit = coboundary_fit(&f, &ws).unwrap();
        assert!(
            fit.normalized_residual > 0.01,
            "antisymmetric part should obstruct the fit, residual {}",
            fit.normalized_residual
        );
    }

    #[test]
    fn fit_reports_rank_deficiency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gens = generators(&mut rng, 3, 2);
        let ws = WordSet::random_walk(&gens, 2, 0, &mut rng).unwrap();
        let db = synthetic_coboundary(|g| displacement(g, 2)[0]);
        let fit = coboundary_fit(&db, &ws).unwrap();
        assert_eq!(fit.rank + fit.nullity, fit.unknowns);
        assert!(fit.nullity >= 1);
    }

    #[test]
    fn degree_checked() {
        let ws = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let gens = generators(&mut rng, 2, 2);
            WordSet::random_walk(&gens, 2, 0, &mut rng).unwrap()
        };
        let one = GroupCochain::new(1, |_| Ok(0.0));
        assert!(coboundary_fit(&one, &ws).is_err());
    }
}
