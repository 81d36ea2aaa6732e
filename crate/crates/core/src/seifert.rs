//! Seifert pairs and their normalization, Hirzebruch–Jung continued
//! fractions, star-shaped plumbing graphs, and the gluing-matrix calculus
//! for bamboos (including the orientation-reversal correction factors).

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::rational::{gcd_i64, mod_inverse, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeifertError {
    #[error("rotation numerator {p} is not coprime to {k}")]
    NotCoprime { k: i64, p: i64 },
    #[error("pair ({0}, {1}) is not normalized")]
    NotNormalized(i64, i64),
    #[error("Euler term -Σβ/α = {0} is not an integer: no horizontal surface with these data")]
    NonIntegralEuler(String),
    #[error("invalid pair ({0}, {1}): need 0 < β < α and gcd = 1")]
    BadPair(i64, i64),
    #[error("division by zero evaluating a continued fraction at depth {0}")]
    DivisionByZero(usize),
    #[error("empty weight chain")]
    EmptyChain,
    #[error("plumbing graph is not star-shaped: {0}")]
    NotStarShaped(String),
}

/// An (α, β) pair; normalized means 0 ≤ β < α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeifertPair {
    pub alpha: i64,
    pub beta: i64,
}

impl SeifertPair {
    pub fn new(alpha: i64, beta: i64) -> Self {
        assert!(alpha >= 1);
        SeifertPair { alpha, beta }
    }

    pub fn is_normalized(&self) -> bool {
        0 <= self.beta
            && self.beta < self.alpha
            && (self.alpha == 1 || gcd_i64(self.alpha, self.beta) == 1)
    }

    /// β/α as an exact rational.
    pub fn fraction(&self) -> Rational {
        Rational::new(BigInt::from(self.beta), BigInt::from(self.alpha))
    }
}

/// Base genus, boundary count, normalized pairs, optional integer Euler term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeifertFibering {
    pub genus: i64,
    pub boundary: i64,
    pub pairs: Vec<SeifertPair>,
    pub euler: Option<i64>,
}

impl SeifertFibering {
    pub fn new(genus: i64, boundary: i64, pairs: Vec<SeifertPair>, euler: Option<i64>) -> Self {
        SeifertFibering { genus, boundary, pairs, euler }
    }
}

/// Star-shaped plumbing graph: central vertex (Euler weight, genus), one
/// bamboo of integer weights per special fiber, plain arrowheads for the
/// boundary components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    pub euler: i64,
    pub genus: i64,
    pub bamboos: Vec<Vec<i64>>,
    pub arrows: usize,
}

/// 2×2 integer matrix expressed in the (meridian, longitude) and
/// (section, fiber) bases; determinant −1 for every bamboo gluing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluingMatrix(pub [[i64; 2]; 2]);

impl GluingMatrix {
    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn mul(&self, other: &GluingMatrix) -> GluingMatrix {
        let a = self.0;
        let b = other.0;
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        GluingMatrix(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainCase {
    /// Bamboo joining two nodes.
    NodeToNode,
    /// Bamboo ending in a solid torus.
    NodeToDisk,
}

/// Normalized pair of the fiber through a point where the s-th power of an
/// order-(k·s) map acts as a rotation by p/k: returns (k, (−b) mod k) with
/// b·p ≡ 1 (mod k).
pub fn pair_from_rotation(k: i64, p: i64) -> Result<SeifertPair, SeifertError> {
    assert!(k >= 1);
    if k == 1 {
        return Ok(SeifertPair::new(1, 0));
    }
    let b = mod_inverse(p, k).ok_or(SeifertError::NotCoprime { k, p })?;
    Ok(SeifertPair::new(k, (-b).rem_euclid(k)))
}

/// Solid-torus type (p, α) of the special fiber of a normalized pair:
/// p ≡ −c (mod α) with c·β ≡ 1 (mod α), 0 < p < α.
pub fn torus_type(pair: &SeifertPair) -> Result<(i64, i64), SeifertError> {
    if !pair.is_normalized() || pair.alpha <= 1 {
        return Err(SeifertError::NotNormalized(pair.alpha, pair.beta));
    }
    let c = mod_inverse(pair.beta, pair.alpha)
        .ok_or(SeifertError::NotNormalized(pair.alpha, pair.beta))?;
    Ok(((-c).rem_euclid(pair.alpha), pair.alpha))
}

/// Euler term b = −Σ β/α, which must be an integer when the data bound a
/// horizontal surface.
pub fn euler_b(pairs: &[SeifertPair]) -> Result<i64, SeifertError> {
    let mut sum = Rational::zero();
    for p in pairs {
        sum += p.fraction();
    }
    let b = -sum;
    if b.denom().is_one() {
        Ok(i64::try_from(b.to_integer()).expect("euler term fits i64"))
    } else {
        Err(SeifertError::NonIntegralEuler(format!("{}/{}", b.numer(), b.denom())))
    }
}

/// Negative (Hirzebruch–Jung) continued fraction expansion of α/β with all
/// entries ≥ 2; requires 0 < β < α coprime.
pub fn cont_frac(alpha: i64, beta: i64) -> Result<Vec<i64>, SeifertError> {
    if !(0 < beta && beta < alpha && gcd_i64(alpha, beta) == 1) {
        return Err(SeifertError::BadPair(alpha, beta));
    }
    let mut out = Vec::new();
    let (mut a, mut b) = (alpha, beta);
    while b > 0 {
        // ceil(a/b)
        let c = (a + b - 1) / b;
        out.push(c);
        let r = c * b - a;
        a = b;
        b = r;
    }
    debug_assert!(out.iter().all(|&c| c >= 2));
    Ok(out)
}

/// Evaluates b₁ − 1/(b₂ − 1/(…)).
pub fn eval_cont_frac(chain: &[i64]) -> Result<Rational, SeifertError> {
    if chain.is_empty() {
        return Err(SeifertError::EmptyChain);
    }
    let mut value: Option<Rational> = None;
    for (depth, &b) in chain.iter().enumerate().rev() {
        let b = Rational::from(BigInt::from(b));
        value = Some(match value {
            None => b,
            Some(v) => {
                if v.is_zero() {
                    return Err(SeifertError::DivisionByZero(depth));
                }
                b - v.recip()
            }
        });
    }
    Ok(value.unwrap())
}

const J: GluingMatrix = GluingMatrix([[0, 1], [1, 0]]);

fn step(e: i64) -> GluingMatrix {
    GluingMatrix([[0, -1], [1, -e]])
}

/// Gluing matrix of a bamboo of weights, as the exact product of the
/// elementary factors (orientation-reversal corrections included).
/// Case NodeToNode: −b/a = [e₁,…,e_k]; case NodeToDisk: −d/c = [e₁,…,e_k].
pub fn gluing_matrix(chain: &[i64], case: ChainCase) -> Result<GluingMatrix, SeifertError> {
    if chain.is_empty() {
        return Err(SeifertError::EmptyChain);
    }
    let mut m = match case {
        ChainCase::NodeToNode => J,
        ChainCase::NodeToDisk => {
            let e_k = chain[chain.len() - 1];
            GluingMatrix([[0, 1], [1, -e_k]])
        }
    };
    let upper = match case {
        ChainCase::NodeToNode => chain.len(),
        ChainCase::NodeToDisk => chain.len() - 1,
    };
    for i in (0..upper).rev() {
        m = m.mul(&step(chain[i]));
    }
    Ok(m)
}

/// The same matrices as the raw composition of all elementary gluings: the
/// swap J between plumbing pieces, the annulus orientation correction
/// (−1 0; 0 1) on each side of every Euler-twist factor (−1 0; e 1).
/// Used as an independent oracle for [`gluing_matrix`].
pub fn gluing_matrix_raw(chain: &[i64], case: ChainCase) -> Result<GluingMatrix, SeifertError> {
    if chain.is_empty() {
        return Err(SeifertError::EmptyChain);
    }
    let a = GluingMatrix([[-1, 0], [0, 1]]);
    let twist = |e: i64| GluingMatrix([[-1, 0], [e, 1]]);
    let mut m = GluingMatrix([[1, 0], [0, 1]]);
    match case {
        ChainCase::NodeToNode => {
            m = m.mul(&J);
            for (i, &e) in chain.iter().rev().enumerate() {
                if i > 0 {
                    m = m.mul(&J);
                }
                m = m.mul(&a).mul(&twist(e)).mul(&a);
            }
            m = m.mul(&J);
        }
        ChainCase::NodeToDisk => {
            for (i, &e) in chain.iter().rev().enumerate() {
                if i > 0 {
                    m = m.mul(&a).mul(&twist(e)).mul(&a);
                } else {
                    m = m.mul(&twist(e)).mul(&a);
                }
                m = m.mul(&J);
            }
        }
    }
    Ok(m)
}

/// Star-shaped plumbing of a fibering: central vertex (b, g), one bamboo per
/// normalized pair, one arrowhead per boundary component.
pub fn plumbing_from_fibering(f: &SeifertFibering) -> Result<PlumbingGraph, SeifertError> {
    let euler = match f.euler {
        Some(b) => b,
        None => euler_b(&f.pairs)?,
    };
    let mut bamboos = Vec::new();
    for p in &f.pairs {
        if !p.is_normalized() {
            return Err(SeifertError::NotNormalized(p.alpha, p.beta));
        }
        if p.alpha > 1 {
            bamboos.push(cont_frac(p.alpha, p.beta)?);
        }
    }
    Ok(PlumbingGraph {
        euler,
        genus: f.genus,
        bamboos,
        arrows: usize::try_from(f.boundary).unwrap_or(0),
    })
}

/// Reads the fibering back off a star-shaped plumbing graph.
pub fn fibering_from_plumbing(p: &PlumbingGraph) -> Result<SeifertFibering, SeifertError> {
    let mut pairs = Vec::new();
    for bamboo in &p.bamboos {
        if bamboo.iter().any(|&w| w < 2) {
            return Err(SeifertError::NotStarShaped(format!(
                "bamboo {bamboo:?} has a weight < 2"
            )));
        }
        let v = eval_cont_frac(bamboo)?;
        let alpha = i64::try_from(v.numer().clone()).map_err(|_| {
            SeifertError::NotStarShaped("bamboo value overflows".into())
        })?;
        let beta = i64::try_from(v.denom().clone()).map_err(|_| {
            SeifertError::NotStarShaped("bamboo value overflows".into())
        })?;
        if !(0 < beta && beta < alpha) {
            return Err(SeifertError::NotStarShaped(format!(
                "bamboo {bamboo:?} evaluates to {alpha}/{beta}, not a normalized pair"
            )));
        }
        pairs.push(SeifertPair::new(alpha, beta));
    }
    Ok(SeifertFibering::new(
        p.genus,
        i64::try_from(p.arrows).unwrap(),
        pairs,
        Some(p.euler),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn pairs_from_the_worked_rotations() {
        assert_eq!(pair_from_rotation(11, 4).unwrap(), SeifertPair::new(11, 8));
        assert_eq!(pair_from_rotation(4, 3).unwrap(), SeifertPair::new(4, 1));
        assert_eq!(pair_from_rotation(44, -1).unwrap(), SeifertPair::new(44, 1));
        assert!(matches!(
            pair_from_rotation(9, 6),
            Err(SeifertError::NotCoprime { .. })
        ));
    }

    #[test]
    fn torus_types() {
        assert_eq!(torus_type(&SeifertPair::new(3, 2)).unwrap(), (1, 3));
        assert_eq!(torus_type(&SeifertPair::new(2, 1)).unwrap(), (1, 2));
        assert_eq!(torus_type(&SeifertPair::new(11, 8)).unwrap(), (4, 11));
        assert!(torus_type(&SeifertPair::new(4, 7)).is_err());
    }

    #[test]
    fn rotation_torus_round_trip() {
        for k in 2..40i64 {
            for p in 1..k {
                if gcd_i64(p, k) != 1 {
                    continue;
                }
                let pair = pair_from_rotation(k, p).unwrap();
                assert_eq!(torus_type(&pair).unwrap(), (p.rem_euclid(k), k));
            }
        }
    }

    #[test]
    fn euler_terms() {
        let pairs = [
            SeifertPair::new(4, 1),
            SeifertPair::new(11, 8),
            SeifertPair::new(44, 1),
        ];
        assert_eq!(euler_b(&pairs).unwrap(), -1);
        assert_eq!(euler_b(&[]).unwrap(), 0);
        assert!(matches!(
            euler_b(&[SeifertPair::new(2, 1), SeifertPair::new(3, 2)]),
            Err(SeifertError::NonIntegralEuler(_))
        ));
    }

    #[test]
    fn continued_fractions_match_the_examples() {
        assert_eq!(cont_frac(11, 8).unwrap(), vec![2, 2, 3, 2]);
        assert_eq!(cont_frac(4, 1).unwrap(), vec![4]);
        assert_eq!(cont_frac(3, 2).unwrap(), vec![2, 2]);
        assert_eq!(cont_frac(2, 1).unwrap(), vec![2]);
        assert_eq!(eval_cont_frac(&[2, 2, 3, 2]).unwrap(), rat(11, 8));
        assert_eq!(eval_cont_frac(&[4]).unwrap(), rat_int(4));
    }

    #[test]
    fn all_twos_evaluates_by_induction() {
        // Oracle: [2; k] = (k+1)/k, provable by induction; check against the
        // evaluator for a range of k.
        for k in 1..30i64 {
            let chain = vec![2i64; k as usize];
            assert_eq!(eval_cont_frac(&chain).unwrap(), rat(k + 1, k));
        }
    }

    #[test]
    fn division_by_zero_reports_depth() {
        // [1, 1] hits 1 - 1/1 = 0 one level up.
        assert!(matches!(
            eval_cont_frac(&[2, 1, 1]),
            Err(SeifertError::DivisionByZero(_))
        ));
    }

    #[test]
    fn gluing_matrix_base_cases() {
        let m = gluing_matrix(&[2], ChainCase::NodeToDisk).unwrap();
        assert_eq!(m.0, [[0, 1], [1, -2]]);
        assert_eq!(m.det(), -1);
        let e = 5;
        let m = gluing_matrix(&[e], ChainCase::NodeToNode).unwrap();
        assert_eq!(m.0, [[1, -e], [0, -1]]);
        assert_eq!(m.det(), -1);
    }

    #[test]
    fn gluing_matrix_fraction_identities() {
        let chain = [2i64, 2, 3, 2];
        let m = gluing_matrix(&chain, ChainCase::NodeToNode).unwrap();
        assert_eq!(m.det(), -1);
        let frac = rat(-m.0[0][1], m.0[0][0]);
        assert_eq!(frac, eval_cont_frac(&chain).unwrap());
        let m = gluing_matrix(&chain, ChainCase::NodeToDisk).unwrap();
        assert_eq!(m.det(), -1);
        let frac = rat(-m.0[1][1], m.0[1][0]);
        assert_eq!(frac, eval_cont_frac(&chain).unwrap());
    }

    #[test]
    fn raw_composition_agrees_with_closed_form() {
        let chains: Vec<Vec<i64>> = vec![
            vec![2],
            vec![4],
            vec![2, 2],
            vec![2, 2, 3, 2],
            vec![3, 5, 2, 2, 7],
        ];
        for chain in &chains {
            for case in [ChainCase::NodeToNode, ChainCase::NodeToDisk] {
                assert_eq!(
                    gluing_matrix(chain, case).unwrap(),
                    gluing_matrix_raw(chain, case).unwrap(),
                    "chain {chain:?} case {case:?}"
                );
            }
        }
    }

    #[test]
    fn plumbing_round_trip() {
        let f = SeifertFibering::new(
            0,
            1,
            vec![SeifertPair::new(11, 8), SeifertPair::new(4, 1)],
            Some(-1),
        );
        let p = plumbing_from_fibering(&f).unwrap();
        assert_eq!(p.euler, -1);
        assert_eq!(p.bamboos, vec![vec![2, 2, 3, 2], vec![4]]);
        assert_eq!(p.arrows, 1);
        let f2 = fibering_from_plumbing(&p).unwrap();
        assert_eq!(f2.pairs, f.pairs);
        assert_eq!(f2.euler, Some(-1));
        assert_eq!((f2.genus, f2.boundary), (0, 1));
    }

    #[test]
    fn trivial_plumbing() {
        let f = SeifertFibering::new(0, 1, vec![], Some(0));
        let p = plumbing_from_fibering(&f).unwrap();
        assert_eq!(p.euler, 0);
        assert!(p.bamboos.is_empty());
        assert_eq!(p.arrows, 1);
        let f2 = fibering_from_plumbing(&p).unwrap();
        assert!(f2.pairs.is_empty());
    }

    #[test]
    fn two_bamboo_fixture_reads_back() {
        let p = crate::fixtures::two_bamboo_plumbing();
        let f = fibering_from_plumbing(&p).unwrap();
        assert_eq!(f.pairs, crate::fixtures::two_bamboo_pairs());
        assert_eq!((f.genus, f.boundary), (0, 2));
    }

    #[test]
    fn bad_bamboo_is_rejected() {
        let p = PlumbingGraph {
            euler: 0,
            genus: 0,
            bamboos: vec![vec![1, 2]],
            arrows: 1,
        };
        assert!(matches!(
            fibering_from_plumbing(&p),
            Err(SeifertError::NotStarShaped(_))
        ));
    }
}
