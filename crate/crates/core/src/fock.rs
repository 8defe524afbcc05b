//! Few-mode bosonic Fock space.
//!
//! States are sparse maps from occupation-number vectors to complex
//! amplitudes. Operators are complex-weighted sums of ordered products of
//! creation and annihilation operators; within a product the rightmost factor
//! acts first.
//!
//! States are never normalized implicitly, so expectation values are raw
//! `<s|E|s>` values.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Index of a mode inside a fixed mode registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId(pub usize);

impl ModeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

/// Occupation-number vector over an ordered mode registry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockBasisState {
    occupations: Vec<u32>,
}

impl FockBasisState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self { occupations }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self { occupations: vec![0; modes] }
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    /// Photon count in `mode`. Panics if the mode is outside the registry.
    pub fn occupation(&self, mode: ModeId) -> u32 {
        self.occupations[mode.0]
    }

    pub fn total_photons(&self) -> u64 {
        self.occupations.iter().map(|&n| u64::from(n)).sum()
    }
}

impl fmt::Display for FockBasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.occupations.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

fn check_finite(amp: Amplitude) -> Result<Amplitude> {
    if amp.re.is_finite() && amp.im.is_finite() {
        Ok(amp)
    } else {
        Err(Error::invalid(format!("non-finite amplitude {amp}")))
    }
}

/// Sparse superposition of Fock basis states.
///
/// Keys always have length `modes` and stored amplitudes are never exactly
/// zero. The norm is not constrained.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    modes: usize,
    terms: BTreeMap<FockBasisState, Amplitude>,
}

impl StateVector {
    /// The zero vector (no terms) over `modes` modes.
    pub fn zero(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("mode count must be at least 1"));
        }
        Ok(Self { modes, terms: BTreeMap::new() })
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        let mut s = Self::zero(modes)?;
        s.terms.insert(FockBasisState::vacuum(modes), Amplitude::new(1.0, 0.0));
        Ok(s)
    }

    /// A single basis state with unit amplitude.
    pub fn basis(occupations: Vec<u32>) -> Result<Self> {
        let modes = occupations.len();
        Self::from_terms(modes, [(FockBasisState::new(occupations), Amplitude::new(1.0, 0.0))])
    }

    /// Builds a state from `(basis, amplitude)` pairs, summing repeated keys.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockBasisState, Amplitude)>,
    {
        let mut s = Self::zero(modes)?;
        for (basis, amp) in terms {
            if basis.modes() != modes {
                return Err(Error::ModeCountMismatch { left: modes, right: basis.modes() });
            }
            s.accumulate(basis, check_finite(amp)?);
        }
        Ok(s)
    }

    fn accumulate(&mut self, basis: FockBasisState, amp: Amplitude) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(basis) {
            Entry::Vacant(v) => {
                if amp != Amplitude::new(0.0, 0.0) {
                    v.insert(amp);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + amp;
                if sum == Amplitude::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Amplitude of `basis`, zero when absent.
    pub fn amplitude(&self, basis: &FockBasisState) -> Amplitude {
        self.terms.get(basis).copied().unwrap_or_default()
    }

    /// Amplitude of the basis state with the given occupations.
    pub fn amplitude_of(&self, occupations: &[u32]) -> Amplitude {
        self.amplitude(&FockBasisState::new(occupations.to_vec()))
    }

    /// Terms in ascending basis order.
    pub fn iter(&self) -> impl Iterator<Item = (&FockBasisState, &Amplitude)> {
        self.terms.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Amplitude) -> Result<Self> {
        check_finite(factor)?;
        let mut out = Self::zero(self.modes)?;
        for (b, a) in &self.terms {
            out.accumulate(b.clone(), *a * factor);
        }
        Ok(out)
    }

    /// Vector sum of two states over the same registry.
    pub fn added(&self, other: &StateVector) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::ModeCountMismatch { left: self.modes, right: other.modes });
        }
        let mut out = self.clone();
        for (b, a) in &other.terms {
            out.accumulate(b.clone(), *a);
        }
        Ok(out)
    }

    fn check_mode(&self, mode: ModeId) -> Result<()> {
        if mode.0 < self.modes {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange { mode: mode.0, modes: self.modes })
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a}){b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// A single creation or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderOp {
    pub mode: ModeId,
    pub kind: LadderKind,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self { mode: ModeId(mode), kind: LadderKind::Create }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { mode: ModeId(mode), kind: LadderKind::Annihilate }
    }

    pub fn dagger(self) -> Self {
        let kind = match self.kind {
            LadderKind::Create => LadderKind::Annihilate,
            LadderKind::Annihilate => LadderKind::Create,
        };
        Self { mode: self.mode, kind }
    }
}

impl fmt::Display for LadderOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LadderKind::Create => write!(f, "a{}^+", self.mode.0),
            LadderKind::Annihilate => write!(f, "a{}", self.mode.0),
        }
    }
}

/// One product term `coefficient * f_1 f_2 ... f_n`; `f_n` acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Amplitude,
    pub factors: Vec<LadderOp>,
}

impl Term {
    pub fn new(coefficient: Amplitude, factors: Vec<LadderOp>) -> Self {
        Self { coefficient, factors }
    }

    /// No annihilator stands left of a creator.
    pub fn is_normal_ordered(&self) -> bool {
        first_disordered_pair(&self.factors).is_none()
    }
}

/// Sum of ladder-operator products with complex coefficients.
///
/// An empty factor list is the identity scaled by its coefficient. An
/// expression with no terms is the zero operator.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorExpression {
    terms: Vec<Term>,
}

impl OperatorExpression {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::scalar(Amplitude::new(1.0, 0.0))
    }

    pub fn scalar(c: Amplitude) -> Self {
        debug_assert!(c.re.is_finite() && c.im.is_finite());
        Self { terms: vec![Term::new(c, Vec::new())] }
    }

    pub fn ladder(op: LadderOp) -> Self {
        Self { terms: vec![Term::new(Amplitude::new(1.0, 0.0), vec![op])] }
    }

    pub fn create(mode: usize) -> Self {
        Self::ladder(LadderOp::create(mode))
    }

    pub fn annihilate(mode: usize) -> Self {
        Self::ladder(LadderOp::annihilate(mode))
    }

    /// Product `c * f_1 ... f_n` as a single-term expression.
    pub fn product(c: Amplitude, factors: Vec<LadderOp>) -> Result<Self> {
        Self::from_terms(vec![Term::new(c, factors)])
    }

    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            check_finite(t.coefficient)?;
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest mode index referenced, if any factor exists.
    pub fn max_mode(&self) -> Option<ModeId> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.mode)).max()
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.iter().all(Term::is_normal_ordered)
    }

    pub fn scaled(&self, c: Amplitude) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coefficient * c, t.factors.clone()))
                .collect(),
        }
    }

    /// Operator product `self * rhs`: `rhs` acts first.
    pub fn compose(&self, rhs: &OperatorExpression) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for l in &self.terms {
            for r in &rhs.terms {
                let mut factors = l.factors.clone();
                factors.extend_from_slice(&r.factors);
                terms.push(Term::new(l.coefficient * r.coefficient, factors));
            }
        }
        Self { terms }
    }

    pub fn adjoint(&self) -> Self {
        adjoint(self)
    }
}

impl Add for OperatorExpression {
    type Output = OperatorExpression;

    fn add(mut self, rhs: OperatorExpression) -> OperatorExpression {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for OperatorExpression {
    type Output = OperatorExpression;

    fn neg(self) -> OperatorExpression {
        self.scaled(Amplitude::new(-1.0, 0.0))
    }
}

impl Sub for OperatorExpression {
    type Output = OperatorExpression;

    fn sub(self, rhs: OperatorExpression) -> OperatorExpression {
        self + (-rhs)
    }
}

impl Mul for OperatorExpression {
    type Output = OperatorExpression;

    fn mul(self, rhs: OperatorExpression) -> OperatorExpression {
        self.compose(&rhs)
    }
}

impl Mul<OperatorExpression> for Amplitude {
    type Output = OperatorExpression;

    fn mul(self, rhs: OperatorExpression) -> OperatorExpression {
        rhs.scaled(self)
    }
}

impl fmt::Display for OperatorExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.coefficient)?;
            if t.factors.is_empty() {
                write!(f, "I")?;
            }
            for op in &t.factors {
                write!(f, " {op}")?;
            }
        }
        Ok(())
    }
}

/// The vacuum `|0,...,0>` over `modes` modes.
pub fn vacuum(modes: usize) -> Result<StateVector> {
    StateVector::vacuum(modes)
}

/// Applies one ladder operator with the usual `sqrt(n+1)` / `sqrt(n)`
/// matrix elements.
pub fn apply_ladder(op: LadderOp, s: &StateVector) -> Result<StateVector> {
    s.check_mode(op.mode)?;
    let m = op.mode.0;
    let mut out = StateVector::zero(s.modes)?;
    for (basis, amp) in &s.terms {
        let n = basis.occupations[m];
        let mut occ = basis.occupations.clone();
        let factor = match op.kind {
            LadderKind::Create => {
                occ[m] = n
                    .checked_add(1)
                    .ok_or_else(|| Error::invalid("photon number overflow"))?;
                f64::from(occ[m]).sqrt()
            }
            LadderKind::Annihilate => {
                if n == 0 {
                    continue;
                }
                occ[m] = n - 1;
                f64::from(n).sqrt()
            }
        };
        out.accumulate(FockBasisState::new(occ), *amp * factor);
    }
    Ok(out)
}

fn check_expression_modes(e: &OperatorExpression, modes: usize) -> Result<()> {
    match e.max_mode() {
        Some(m) if m.0 >= modes => Err(Error::ModeOutOfRange { mode: m.0, modes }),
        _ => Ok(()),
    }
}

/// Applies `e` to `s`, each product right-to-left.
pub fn apply_expression(e: &OperatorExpression, s: &StateVector) -> Result<StateVector> {
    check_expression_modes(e, s.modes)?;
    let mut out = StateVector::zero(s.modes)?;
    for term in &e.terms {
        let mut acc = s.clone();
        for op in term.factors.iter().rev() {
            if acc.is_empty() {
                break;
            }
            acc = apply_ladder(*op, &acc)?;
        }
        for (b, a) in acc.terms {
            out.accumulate(b, a * term.coefficient);
        }
    }
    Ok(out)
}

/// `<bra|ket>`, antilinear in `bra`.
pub fn inner_product(bra: &StateVector, ket: &StateVector) -> Result<Amplitude> {
    if bra.modes != ket.modes {
        return Err(Error::ModeCountMismatch { left: bra.modes, right: ket.modes });
    }
    // iterate the smaller map
    let sum = if bra.len() <= ket.len() {
        bra.terms
            .iter()
            .filter_map(|(b, x)| ket.terms.get(b).map(|y| x.conj() * y))
            .sum()
    } else {
        ket.terms
            .iter()
            .filter_map(|(b, y)| bra.terms.get(b).map(|x| x.conj() * y))
            .sum()
    };
    Ok(sum)
}

/// Hermitian adjoint: conjugate coefficients, reverse each product and
/// swap creators with annihilators.
pub fn adjoint(e: &OperatorExpression) -> OperatorExpression {
    OperatorExpression {
        terms: e
            .terms
            .iter()
            .map(|t| {
                Term::new(
                    t.coefficient.conj(),
                    t.factors.iter().rev().map(|op| op.dagger()).collect(),
                )
            })
            .collect(),
    }
}

/// `<s|e|s>`.
pub fn expectation(e: &OperatorExpression, s: &StateVector) -> Result<Amplitude> {
    let es = apply_expression(e, s)?;
    inner_product(s, &es)
}

fn first_disordered_pair(factors: &[LadderOp]) -> Option<usize> {
    factors.windows(2).position(|w| {
        w[0].kind == LadderKind::Annihilate && w[1].kind == LadderKind::Create
    })
}

/// Rewrites `e` so every product has all creators left of all annihilators.
///
/// The first adjacent pair `a_i a_j^+` of each product is replaced by
/// `a_j^+ a_i + delta_ij`; terms with identical factor lists are then merged
/// in order of first appearance and exact-zero sums are dropped.
pub fn normal_order(e: &OperatorExpression) -> OperatorExpression {
    let mut pending: VecDeque<Term> = e.terms.iter().cloned().collect();
    let mut done: Vec<Term> = Vec::new();

    while let Some(term) = pending.pop_front() {
        let Some(i) = first_disordered_pair(&term.factors) else {
            match done.iter_mut().find(|d| d.factors == term.factors) {
                Some(d) => d.coefficient += term.coefficient,
                None => done.push(term),
            }
            continue;
        };
        let (left, right) = (term.factors[i], term.factors[i + 1]);
        let mut swapped = term.factors.clone();
        swapped.swap(i, i + 1);
        pending.push_back(Term::new(term.coefficient, swapped));
        if left.mode == right.mode {
            let mut contracted = term.factors.clone();
            contracted.drain(i..i + 2);
            pending.push_back(Term::new(term.coefficient, contracted));
        }
    }

    done.retain(|t| t.coefficient != Amplitude::new(0.0, 0.0));
    OperatorExpression { terms: done }
}
