//! Flexibility witnesses and local-agreement certificates.

use crate::antichain::{check_complete_code, ConeAntichain};
use crate::error::{Error, Result};
use crate::map::CantorMap;
use crate::prefix_map::PrefixExchangeMap;
use crate::word::{concat, shortlex, EpWord, Letter, Word};

/// An element `g` of `V_n` with `(E1)g` a proper subset of `E2`.
///
/// With `w` the shortlex-least cone of `E2` and `m = |E1|`, the cones of `E1`
/// go to `w·(n-1)^i·0` for `i < m`; the complements are then split until they
/// have the same size and paired in order.
pub fn flexibility_witness(e1: &ConeAntichain, e2: &ConeAntichain) -> Result<PrefixExchangeMap> {
    let n = e1.alphabet_size();
    if n != e2.alphabet_size() {
        return Err(Error::AlphabetMismatch { left: n, right: e2.alphabet_size() });
    }
    for e in [e1, e2] {
        if e.is_empty() || e.is_full() {
            return Err(Error::ImproperClopen);
        }
    }
    let w = e2.words().iter().min_by(|a, b| shortlex(a).cmp(&shortlex(b))).unwrap().clone();
    let last = (n - 1) as Letter;
    let targets: Vec<Word> = (0..e1.len())
        .map(|i| {
            let mut t = w.clone();
            t.extend(std::iter::repeat_n(last, i));
            t.push(0);
            t
        })
        .collect();
    let mut dom_rest: Vec<Word> = e1.complement().words().to_vec();
    let mut ran_rest: Vec<Word> = ConeAntichain::new(n, targets.clone())?.complement().words().to_vec();
    while dom_rest.len() != ran_rest.len() {
        let smaller = if dom_rest.len() < ran_rest.len() { &mut dom_rest } else { &mut ran_rest };
        let (i, _) = smaller.iter().enumerate().min_by_key(|(_, u)| shortlex(u)).unwrap();
        let u = smaller.remove(i);
        smaller.extend((0..n as Letter).map(|x| concat(&u, &[x])));
    }
    dom_rest.sort_by(|a, b| shortlex(a).cmp(&shortlex(b)));
    ran_rest.sort_by(|a, b| shortlex(a).cmp(&shortlex(b)));
    let mut pairs: Vec<(Word, Word)> = e1.words().iter().cloned().zip(targets).collect();
    pairs.extend(dom_rest.into_iter().zip(ran_rest));
    let g = PrefixExchangeMap::new(n, pairs)?;
    let image = g.image_of_clopen(e1);
    if !image.is_subset(e2) || image == *e2 {
        return Err(Error::InternalInvariantViolation(format!(
            "witness maps E1 onto {image}, not into a proper subset of {e2}"
        )));
    }
    Ok(g)
}

/// Does `h` agree with the paired map on every cover cone, tested on all
/// points `c·x` with `x` of preperiod plus period at most `depth`?
pub fn local_agreement_check(
    h: &dyn CantorMap,
    cover: &[(Word, &dyn CantorMap)],
    depth: usize,
) -> Result<bool> {
    let n = h.alphabet_size();
    let cones: Vec<Word> = cover.iter().map(|(c, _)| c.clone()).collect();
    check_complete_code(n, &cones)?;
    let samples = EpWord::enumerate(n, depth);
    for (c, g) in cover {
        if g.alphabet_size() != n {
            return Err(Error::AlphabetMismatch { left: n, right: g.alphabet_size() });
        }
        for x in &samples {
            let y = x.prepend(c);
            if h.apply(&y)? != g.apply(&y)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
