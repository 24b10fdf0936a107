//! Deterministic finite automata with output reading base-q digits, most
//! significant digit first, and their compilation into Mahler systems.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactalg::{FieldElem, Matrix, NumberField, Poly};
use crate::series::{CoefficientStream, Source};
use crate::system::MahlerSystem;

#[derive(Clone, Debug)]
pub struct Dfao {
    q: usize,
    field: Arc<NumberField>,
    states: Vec<String>,
    init: usize,
    delta: Vec<Vec<usize>>,
    output: Vec<FieldElem>,
    warnings: Vec<String>,
}

/// Output maps closed under n -> qn + r.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelClosure {
    /// Each map assigns a value to every state.
    pub maps: Vec<Vec<FieldElem>>,
    /// sigma[i][r] is the index of the map tau_i o delta(., r).
    pub sigma: Vec<Vec<usize>>,
}

impl Dfao {
    /// Validates and builds an automaton. Unreachable states are dropped and
    /// reported through `warnings`.
    pub fn new(
        q: usize,
        field: &Arc<NumberField>,
        states: Vec<String>,
        init: usize,
        delta: Vec<Vec<usize>>,
        output: Vec<FieldElem>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidAutomaton(m));
        if q < 2 {
            return bad(format!("base must be at least 2, got {q}"));
        }
        let ns = states.len();
        if ns == 0 || init >= ns {
            return bad("initial state missing".into());
        }
        if delta.len() != ns || output.len() != ns {
            return bad("transition and output tables must cover every state".into());
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != q {
                return bad(format!("state {} has {} transitions, expected {q}", states[s], row.len()));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= ns) {
                return bad(format!("transition to unknown state index {t}"));
            }
        }
        if delta[init][0] != init {
            return bad(format!("initial state {} must loop on digit 0", states[init]));
        }
        let mut seen = vec![false; ns];
        let mut stack = vec![init];
        seen[init] = true;
        while let Some(s) = stack.pop() {
            for &t in &delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut warnings = Vec::new();
        let mut renum = vec![usize::MAX; ns];
        let mut kept = Vec::new();
        for s in 0..ns {
            if seen[s] {
                renum[s] = kept.len();
                kept.push(s);
            } else {
                warnings.push(format!("unreachable state {} removed", states[s]));
            }
        }
        Ok(Dfao {
            q,
            field: field.clone(),
            states: kept.iter().map(|&s| states[s].clone()).collect(),
            init: renum[init],
            delta: kept.iter().map(|&s| delta[s].iter().map(|&t| renum[t]).collect()).collect(),
            output: kept.iter().map(|&s| output[s].clone()).collect(),
            warnings,
        })
    }

    /// Builds from named states.
    pub fn from_named(
        q: usize,
        field: &Arc<NumberField>,
        states: &[&str],
        init: &str,
        delta: &[(&str, Vec<&str>)],
        output: &[(&str, FieldElem)],
    ) -> Result<Self> {
        let idx: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let look = |s: &str| idx.get(s).copied().ok_or_else(|| Error::InvalidAutomaton(format!("unknown state {s}")));
        let mut d = vec![Vec::new(); states.len()];
        for (s, row) in delta {
            d[look(s)?] = row.iter().map(|t| look(t)).collect::<Result<_>>()?;
        }
        let mut out = vec![None; states.len()];
        for (s, v) in output {
            out[look(s)?] = Some(v.clone());
        }
        let out = out
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::InvalidAutomaton(format!("no output for state {}", states[i]))))
            .collect::<Result<_>>()?;
        Self::new(q, field, states.iter().map(|s| s.to_string()).collect(), look(init)?, d, out)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn output(&self) -> &[FieldElem] {
        &self.output
    }

    /// Indicator map of a state, usable as a closure seed.
    pub fn indicator(&self, state: &str) -> Option<Vec<FieldElem>> {
        let i = self.states.iter().position(|s| s == state)?;
        Some(
            (0..self.states.len())
                .map(|j| if i == j { FieldElem::one(&self.field) } else { FieldElem::zero(&self.field) })
                .collect(),
        )
    }

    /// State reached after reading the base-q digits of n, most significant first.
    pub fn state_after(&self, n: usize) -> usize {
        state_after(&self.delta, self.init, self.q, n)
    }

    pub fn coefficient(&self, n: usize) -> FieldElem {
        self.output[self.state_after(n)].clone()
    }

    /// Breadth-first closure from the output map, digits ascending.
    pub fn kernel_closure(&self) -> KernelClosure {
        self.closure_from(vec![self.output.clone()])
    }

    /// Closure explored from the given maps in order; the first must be the
    /// output map.
    pub fn kernel_closure_with_seeds(&self, seeds: Vec<Vec<FieldElem>>) -> Result<KernelClosure> {
        if seeds.first() != Some(&self.output) {
            return Err(Error::InvalidAutomaton("first closure seed must be the output map".into()));
        }
        if let Some(s) = seeds.iter().find(|s| s.len() != self.states.len()) {
            return Err(Error::DimensionMismatch { expected: self.states.len(), found: s.len() });
        }
        Ok(self.closure_from(seeds))
    }

    fn closure_from(&self, seeds: Vec<Vec<FieldElem>>) -> KernelClosure {
        let mut maps: Vec<Vec<FieldElem>> = Vec::new();
        let mut index: HashMap<Vec<FieldElem>, usize> = HashMap::new();
        for s in seeds {
            if !index.contains_key(&s) {
                index.insert(s.clone(), maps.len());
                maps.push(s);
            }
        }
        let mut sigma = Vec::new();
        let mut i = 0;
        while i < maps.len() {
            let mut row = Vec::with_capacity(self.q);
            for r in 0..self.q {
                let m: Vec<FieldElem> =
                    (0..self.states.len()).map(|st| maps[i][self.delta[st][r]].clone()).collect();
                let j = match index.get(&m) {
                    Some(&j) => j,
                    None => {
                        index.insert(m.clone(), maps.len());
                        maps.push(m);
                        maps.len() - 1
                    }
                };
                row.push(j);
            }
            sigma.push(row);
            i += 1;
        }
        KernelClosure { maps, sigma }
    }

    /// Compiles with the default closure.
    pub fn to_mahler_system(&self) -> Result<(MahlerSystem, CoefficientStream)> {
        self.compile(&self.kernel_closure())
    }

    /// A[i][j] = sum of z^r over digits r with sigma(i, r) = j; the stream's
    /// component i is the sequence of map i.
    pub fn compile(&self, closure: &KernelClosure) -> Result<(MahlerSystem, CoefficientStream)> {
        let n = closure.maps.len();
        let f = &self.field;
        let mut m = Matrix::zeros(n, n, &Poly::zero(f));
        for (i, row) in closure.sigma.iter().enumerate() {
            for (r, &j) in row.iter().enumerate() {
                let add = Poly::monomial(FieldElem::one(f), r);
                let cur = m.get(i, j).clone();
                m.set(i, j, &cur + &add);
            }
        }
        let system = MahlerSystem::from_polys(self.q, m).map_err(|e| match e {
            Error::DegenerateSystem(_) => Error::DegenerateSystem(format!(
                "the {n} kernel sequences satisfy det A(z) = 0; the closure is linearly degenerate"
            )),
            other => other,
        })?;
        let delta = self.delta.clone();
        let (init, q) = (self.init, self.q);
        let maps = closure.maps.clone();
        let stream = CoefficientStream::from_generator(
            f,
            n,
            Source::Automaton,
            true,
            Box::new(move |i, _| {
                let st = state_after(&delta, init, q, i);
                maps.iter().map(|m| m[st].clone()).collect()
            }),
        );
        Ok((system, stream))
    }
}

fn state_after(delta: &[Vec<usize>], init: usize, q: usize, mut n: usize) -> usize {
    let mut digits = Vec::new();
    while n > 0 {
        digits.push(n % q);
        n /= q;
    }
    digits.iter().rev().fold(init, |s, &r| delta[s][r])
}
