//! Graph automaton of a function computed by a nondeterministic binary transducer.
//!
//! States are `(s, E)`, `(s, L)`, `(s, R)` for transducer states `s`, all accepting,
//! plus one rejecting sink. `E` follows the transducer exactly; `L` and `R` follow a
//! run whose output differs from the read output in the other tail of a dyadic.

use crate::buchi::{graph_alphabet, pair_symbol, BuchiAutomaton};
use crate::error::{Error, Result};
use crate::transducer::{Fst, Transducer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Track {
    Exact,
    Left,
    Right,
}

impl Track {
    const ALL: [Track; 3] = [Track::Exact, Track::Left, Track::Right];

    fn offset(self) -> u32 {
        match self {
            Track::Exact => 0,
            Track::Left => 1,
            Track::Right => 2,
        }
    }
}

/// Moves the delay phase into the output phase by writing `0` on every delay-phase
/// transition. The result computes `2^-D·f` with delay 0.
pub fn eliminate_delay(t: &Fst) -> Result<Fst> {
    let d = t.delay() as u32;
    if d == 0 {
        return Ok(t.clone());
    }
    // Copy `k` of state `s` is `s·(D+1) + k`: `k < D` counts delay digits read.
    let n = t.num_states() as u32;
    let id = |s: u32, k: u32| s * (d + 1) + k;
    let mut transitions = Vec::new();
    for (s, a, s2) in t.delay_transitions() {
        for k in 0..d {
            transitions.push((id(s, k), a, 0, id(s2, k + 1)));
        }
    }
    for (s, a, b, s2) in t.transitions() {
        transitions.push((id(s, d), a, b, id(s2, d)));
    }
    let mut outputs = t.output_alphabet().to_vec();
    if !outputs.contains(&0) {
        outputs.push(0);
    }
    Fst::new(
        (n * (d + 1)) as usize,
        t.input_alphabet().to_vec(),
        outputs,
        t.initial().iter().map(|&s| id(s, 0)).collect(),
        0,
        [],
        transitions,
    )
}

/// Graph automaton of the function computed by `t`, or of `2^-D·f` when `t` has
/// delay `D`.
pub fn ntrans_to_buchi(t: &Fst) -> Result<BuchiAutomaton> {
    if !t.is_binary() {
        return Err(Error::Unsupported(
            "graph automata need binary input and output alphabets".into(),
        ));
    }
    let m = eliminate_delay(t)?;
    let n = m.num_states() as u32;
    let state = |s: u32, x: Track| 3 * s + x.offset();
    let sink = 3 * n;
    let writes = |s: u32, a: u8, b: u8| -> Vec<u32> {
        m.successors(&s, a as i8)
            .expect("binary input")
            .into_iter()
            .filter(|&(out, _)| out == b as i8)
            .map(|(_, t)| t)
            .collect()
    };
    let mut transitions = Vec::new();
    for ab in 0..4 {
        transitions.push((sink, ab, sink));
    }
    for s in 0..n {
        for a in 0..2u8 {
            for b in 0..2u8 {
                let sym = pair_symbol(a, b);
                for x in Track::ALL {
                    match x {
                        Track::Left => {
                            if b == 1 {
                                for s2 in writes(s, a, 0) {
                                    transitions.push((state(s, x), sym, state(s2, Track::Left)));
                                }
                            }
                            if !writes(s, a, 1).is_empty() || b == 0 {
                                transitions.push((state(s, x), sym, sink));
                            }
                        }
                        Track::Right => {
                            if b == 0 {
                                for s2 in writes(s, a, 1) {
                                    transitions.push((state(s, x), sym, state(s2, Track::Right)));
                                }
                            }
                            if !writes(s, a, 0).is_empty() || b == 1 {
                                transitions.push((state(s, x), sym, sink));
                            }
                        }
                        Track::Exact => {
                            for s2 in writes(s, a, b) {
                                transitions.push((state(s, x), sym, state(s2, Track::Exact)));
                            }
                            let target = if b == 0 { Track::Left } else { Track::Right };
                            for s2 in writes(s, a, 1 - b) {
                                transitions.push((state(s, x), sym, state(s2, target)));
                            }
                        }
                    }
                }
            }
        }
    }
    BuchiAutomaton::new(
        (3 * n + 1) as usize,
        graph_alphabet(),
        m.initial()
            .iter()
            .map(|&s| state(s, Track::Exact))
            .collect(),
        (0..3 * n).collect(),
        transitions,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{binary_expansions, dyadic_grid, rat};
    use crate::transducer::{constant_zero_writer, delayed_copier};

    #[test]
    fn constant_zero_graph() {
        let a = ntrans_to_buchi(constant_zero_writer(vec![0, 1]).fst()).unwrap();
        for x in dyadic_grid(3) {
            for y in dyadic_grid(3) {
                for xr in binary_expansions(&x).unwrap() {
                    for yr in binary_expansions(&y).unwrap() {
                        let zero = y == rat(0, 1);
                        assert_eq!(a.accepts_graph(&xr, &yr).unwrap(), zero, "{xr} {yr}");
                    }
                }
            }
        }
    }

    #[test]
    fn delay_is_scaled_out() {
        // A delay-1 copier computes x, so A₀ accepts the graph of x/2.
        let a = ntrans_to_buchi(delayed_copier(1).fst()).unwrap();
        for x in dyadic_grid(3) {
            for xr in binary_expansions(&x).unwrap() {
                for yr in binary_expansions(&(&x / rat(2, 1))).unwrap() {
                    assert!(a.accepts_graph(&xr, &yr).unwrap());
                }
                for yr in binary_expansions(&x).unwrap() {
                    let same = x == rat(0, 1);
                    assert_eq!(a.accepts_graph(&xr, &yr).unwrap(), same);
                }
            }
        }
    }

    #[test]
    fn twin_outputs_accepted() {
        let a = ntrans_to_buchi(delayed_copier(0).fst()).unwrap();
        let x: crate::Lasso<u8> = "01(0)".parse().unwrap();
        assert!(a.accepts_graph(&x, &"00(1)".parse().unwrap()).unwrap());
        assert!(a.accepts_graph(&x, &"01(0)".parse().unwrap()).unwrap());
    }
}
