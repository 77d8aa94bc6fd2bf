use core::ops::Range;

use super::{lstm_cell, small_uniform, Group, MetaOptimizer, ModelConfig, ModelKind, Params, RecurrentState};
use crate::error::{invalid, Result};
use crate::gradkit::{Tape, Var};
use crate::rng::SeededRng;

const INPUT: usize = 3;
const HIDDEN: usize = 2;

/// Classical LSTM with input 3 and hidden 2; `Δθ = h_t`.
#[derive(Debug, Clone)]
pub struct Lstm {
    config: ModelConfig,
    params: Params,
    w: Range<usize>,
    b_ih: Range<usize>,
    b_hh: Range<usize>,
}

impl Lstm {
    pub fn new(config: ModelConfig) -> Result<Self> {
        if config.kind != ModelKind::Lstm {
            return Err(invalid("LSTM built from a non-LSTM config"));
        }
        let mut rng = SeededRng::derived(config.seed, 1);
        let mut init = small_uniform(&mut rng);
        let mut params = Params::new();
        let w = params.add("lstm.weight", Group::Core, 4 * HIDDEN, HIDDEN + INPUT, &mut init);
        let b_ih = params.add("lstm.bias_ih", Group::Core, 4 * HIDDEN, 1, &mut init);
        let b_hh = params.add("lstm.bias_hh", Group::Core, 4 * HIDDEN, 1, &mut init);
        Ok(Self { config, params, w, b_ih, b_hh })
    }
}

impl MetaOptimizer for Lstm {
    fn kind(&self) -> ModelKind {
        ModelKind::Lstm
    }

    fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn params(&self) -> &Params {
        &self.params
    }

    fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    fn initial_state(&self, tape: &mut Tape) -> RecurrentState {
        RecurrentState::zeros(tape, HIDDEN, 0)
    }

    fn cell(&self, tape: &mut Tape, p: &[Var], state: &mut RecurrentState, x: [Var; 3]) -> Result<[Var; 2]> {
        let (h, c) = lstm_cell(
            tape,
            &p[self.w.clone()],
            &p[self.b_ih.clone()],
            &p[self.b_hh.clone()],
            &state.h,
            &state.c,
            &x,
        );
        state.h = h;
        state.c = c;
        Ok([state.h[0], state.h[1]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqmodels::step;

    fn first_step(m: &Lstm, y: f64) -> [f64; 2] {
        let mut tape = Tape::new();
        let p = tape.leaves(m.params().values());
        let mut state = m.initial_state(&mut tape);
        let theta = [tape.leaf(0.0), tape.leaf(0.0)];
        let y = tape.leaf(y);
        let next = step(m, &mut tape, &p, &mut state, theta, y).unwrap();
        [tape.value(next[0]), tape.value(next[1])]
    }

    #[test]
    fn zero_weights_propose_nothing() {
        let mut m = Lstm::new(ModelConfig::new(ModelKind::Lstm, 0)).unwrap();
        m.params_mut().values_mut().fill(0.0);
        assert_eq!(first_step(&m, -0.7), [0.0, 0.0]);
    }

    #[test]
    fn seeded_initialization() {
        let a = Lstm::new(ModelConfig::new(ModelKind::Lstm, 4)).unwrap();
        let b = Lstm::new(ModelConfig::new(ModelKind::Lstm, 4)).unwrap();
        let c = Lstm::new(ModelConfig::new(ModelKind::Lstm, 5)).unwrap();
        assert_eq!(a.params(), b.params());
        assert_ne!(a.params().values(), c.params().values());
        assert!(a.params().values().iter().all(|v| v.abs() < 0.1));
        assert_eq!(first_step(&a, -0.5), first_step(&b, -0.5));
    }

    #[test]
    fn rejects_foreign_config() {
        assert!(Lstm::new(ModelConfig::new(ModelKind::Qfwp, 0)).is_err());
    }
}
