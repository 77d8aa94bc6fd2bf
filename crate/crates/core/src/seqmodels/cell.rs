use alloc::vec::Vec;

use crate::gradkit::{Tape, Var};

/// Shared LSTM tail: given gate pre-activations, returns `(h_t, c_t)` with
///
/// ```text
/// f = σ(f_pre)   i = σ(i_pre)   c̃ = tanh(g_pre)   o = σ(o_pre)
/// c_t = f ⊙ c_{t−1} + i ⊙ c̃
/// h_t = o ⊙ tanh(c_t)
/// ```
pub fn gated_update(
    tape: &mut Tape,
    f_pre: &[Var],
    i_pre: &[Var],
    g_pre: &[Var],
    o_pre: &[Var],
    c_prev: &[Var],
) -> (Vec<Var>, Vec<Var>) {
    let mut h = Vec::with_capacity(c_prev.len());
    let mut c = Vec::with_capacity(c_prev.len());
    for k in 0..c_prev.len() {
        let f = tape.sigmoid(f_pre[k]);
        let i = tape.sigmoid(i_pre[k]);
        let g = tape.tanh(g_pre[k]);
        let o = tape.sigmoid(o_pre[k]);
        let keep = tape.mul(f, c_prev[k]);
        let write = tape.mul(i, g);
        let ck = tape.add(keep, write);
        let tc = tape.tanh(ck);
        h.push(tape.mul(o, tc));
        c.push(ck);
    }
    (h, c)
}

/// Classical LSTM cell on `[h_{t−1}; x_t]`.
///
/// `w` is row-major `4H × (H + I)` with gate blocks in the order
/// forget, input, candidate, output; `b_ih` and `b_hh` are both `4H`.
pub fn lstm_cell(
    tape: &mut Tape,
    w: &[Var],
    b_ih: &[Var],
    b_hh: &[Var],
    h: &[Var],
    c: &[Var],
    x: &[Var],
) -> (Vec<Var>, Vec<Var>) {
    let hidden = h.len();
    let v = Tape::concat(h, x);
    let pre = tape.affine(w, &v, &[b_ih, b_hh]);
    let (f, rest) = pre.split_at(hidden);
    let (i, rest) = rest.split_at(hidden);
    let (g, o) = rest.split_at(hidden);
    gated_update(tape, f, i, g, o, c)
}
