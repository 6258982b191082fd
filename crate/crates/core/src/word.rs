//! Finite words over `X_n = {0, .., n-1}` and eventually periodic infinite
//! words, the finite stand-ins for points of Cantor space.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Letter = u8;
pub type Word = Vec<Letter>;

pub const MAX_ALPHABET: usize = 36;

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

pub fn check_alphabet(n: usize) -> Result<()> {
    if (2..=MAX_ALPHABET).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidAlphabet(n))
    }
}

pub fn letter_char(x: Letter) -> char {
    DIGITS[x as usize] as char
}

/// Renders a word, using `ε` for the empty word.
pub fn fmt_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter().map(|&x| letter_char(x)).collect()
    }
}

/// Parses a word; `ε`, `-` and the empty string denote the empty word.
pub fn parse_word(s: &str, n: usize) -> Result<Word> {
    if s == "ε" || s == "-" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| {
            let v = c.to_digit(36).ok_or_else(|| Error::Parse {
                line: 0,
                col: 0,
                msg: format!("bad letter `{c}`"),
            })? as usize;
            if v >= n {
                Err(Error::InvalidLetter { letter: v, alphabet: n })
            } else {
                Ok(v as Letter)
            }
        })
        .collect()
}

pub fn check_word(w: &[Letter], n: usize) -> Result<()> {
    match w.iter().find(|&&x| x as usize >= n) {
        Some(&x) => Err(Error::InvalidLetter { letter: x as usize, alphabet: n }),
        None => Ok(()),
    }
}

/// Length of the longest common prefix.
pub fn lcp_len(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub fn comparable(a: &[Letter], b: &[Letter]) -> bool {
    lcp_len(a, b) == a.len().min(b.len())
}

/// Longest common prefix of a nonempty family of words.
pub fn lcp_all<'a, I>(words: I) -> Option<Word>
where
    I: IntoIterator<Item = &'a [Letter]>,
{
    let mut iter = words.into_iter();
    let mut acc = iter.next()?.to_vec();
    for w in iter {
        let k = lcp_len(&acc, w);
        acc.truncate(k);
    }
    Some(acc)
}

pub fn concat(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = Vec::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

/// All words of length exactly `len`, in lexicographic order.
pub fn words_of_len(n: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n as Letter).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// All words of length at most `len`, shortest first.
pub fn words_up_to(n: usize, len: usize) -> Vec<Word> {
    (0..=len).flat_map(|l| words_of_len(n, l)).collect()
}

/// Length-lexicographic ordering key.
pub fn shortlex(w: &[Letter]) -> (usize, &[Letter]) {
    (w.len(), w)
}

/// An eventually periodic infinite word `u v v v ...`, kept in canonical form
/// (primitive period, shortest preperiod).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpWord {
    pre: Word,
    period: Word,
}

impl EpWord {
    pub fn new(pre: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut x = EpWord { pre, period };
        x.canonicalize();
        Ok(x)
    }

    pub fn constant(x: Letter) -> Self {
        EpWord { pre: Vec::new(), period: vec![x] }
    }

    pub fn preperiod(&self) -> &[Letter] {
        &self.pre
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    fn canonicalize(&mut self) {
        let len = self.period.len();
        for d in 1..=len {
            if len.is_multiple_of(d) && (d..len).all(|i| self.period[i] == self.period[i - d]) {
                self.period.truncate(d);
                break;
            }
        }
        while let Some(&last) = self.pre.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.pre.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn letter(&self, i: usize) -> Letter {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    /// The length-`k` prefix.
    pub fn take(&self, k: usize) -> Word {
        (0..k).map(|i| self.letter(i)).collect()
    }

    /// The suffix after removing `k` letters.
    pub fn drop(&self, k: usize) -> EpWord {
        if k <= self.pre.len() {
            return EpWord { pre: self.pre[k..].to_vec(), period: self.period.clone() };
        }
        let shift = (k - self.pre.len()) % self.period.len();
        let mut period = self.period.clone();
        period.rotate_left(shift);
        EpWord { pre: Vec::new(), period }
    }

    pub fn prepend(&self, w: &[Letter]) -> EpWord {
        let mut x = EpWord { pre: concat(w, &self.pre), period: self.period.clone() };
        x.canonicalize();
        x
    }

    pub fn starts_with(&self, w: &[Letter]) -> bool {
        w.iter().enumerate().all(|(i, &x)| self.letter(i) == x)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        check_word(&self.pre, n)?;
        check_word(&self.period, n)
    }

    /// Every eventually periodic word whose preperiod plus period length is at
    /// most `total`, deduplicated and sorted.
    pub fn enumerate(n: usize, total: usize) -> Vec<EpWord> {
        let mut seen = HashSet::new();
        for plen in 1..=total {
            let periods = words_of_len(n, plen);
            for ulen in 0..=(total - plen) {
                for u in words_of_len(n, ulen) {
                    for v in &periods {
                        seen.insert(EpWord::new(u.clone(), v.clone()).unwrap());
                    }
                }
            }
        }
        let mut all: Vec<_> = seen.into_iter().collect();
        all.sort();
        all
    }
}

impl fmt::Display for EpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre: String = self.pre.iter().map(|&x| letter_char(x)).collect();
        let per: String = self.period.iter().map(|&x| letter_char(x)).collect();
        write!(f, "{pre}({per})")
    }
}

impl FromStr for EpWord {
    type Err = Error;

    /// Parses `u(v)`, e.g. `0(01)` or `(1)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { line: 0, col: 0, msg: format!("{msg}: `{s}`") };
        let open = s.find('(').ok_or_else(|| bad("expected `u(v)`"))?;
        if !s.ends_with(')') {
            return Err(bad("expected closing `)`"));
        }
        let pre = parse_word(&s[..open], MAX_ALPHABET)?;
        let period = parse_word(&s[open + 1..s.len() - 1], MAX_ALPHABET)?;
        EpWord::new(pre, period)
    }
}
