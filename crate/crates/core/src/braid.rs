//! Braid words, their closures, and the per-level slot layout.
//!
//! Conventions: strands run downward; levels 1..=n+1 sit between letters.
//! Letter `(k, +1)` carries the strand at position k over to k+1; `(k, -1)`
//! carries the strand at k+1 over to k. Gap g (0..=m) is the planar strip
//! between strands g and g+1, gap 0 and gap m being the outer strips.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub k: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    pub width: usize,
    pub letters: Vec<Letter>,
}

/// Word over arc generators: `(generator, exponent)` with exponent +-1, read
/// left to right as a matrix product.
pub type Word = Vec<(usize, i8)>;

impl BraidWord {
    pub fn new(width: usize, letters: Vec<Letter>) -> Result<Self> {
        if width < 2 {
            return Err(Error::Syntax(format!("width {width} < 2")));
        }
        for l in &letters {
            if l.k < 1 || l.k >= width {
                return Err(Error::Index { k: l.k as i64, max: width - 1 });
            }
            if l.sign != 1 && l.sign != -1 {
                return Err(Error::Syntax(format!("sign {}", l.sign)));
            }
        }
        let b = BraidWord { width, letters };
        let comps = b.components();
        if comps != 1 {
            return Err(Error::NotAKnot { components: comps });
        }
        Ok(b)
    }

    pub fn from_signed(width: usize, ks: &[i64]) -> Result<Self> {
        let mut letters = Vec::with_capacity(ks.len());
        for &k in ks {
            if k == 0 || k.unsigned_abs() as usize >= width {
                return Err(Error::Index { k, max: width.saturating_sub(1) });
            }
            letters.push(Letter { k: k.unsigned_abs() as usize, sign: k.signum() as i8 });
        }
        BraidWord::new(width, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|l| l.sign as i64).sum()
    }

    /// `perm[p]` is the bottom position of the strand entering at top position p.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.width).collect(); // at[pos] = start position
        for l in &self.letters {
            at.swap(l.k - 1, l.k);
        }
        let mut perm = vec![0; self.width];
        for (pos, &start) in at.iter().enumerate() {
            perm[start] = pos;
        }
        perm
    }

    pub fn components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; self.width];
        let mut count = 0;
        for s in 0..self.width {
            if !seen[s] {
                count += 1;
                let mut p = s;
                while !seen[p] {
                    seen[p] = true;
                    p = perm[p];
                }
            }
        }
        count
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.letters.iter().map(|l| (l.k as i64 * l.sign as i64).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Parse `s1 s2^-1 ...` or `[1,-2,...]`. Width defaults to max|k|+1.
pub fn parse_braid_word(text: &str, width: Option<usize>) -> Result<BraidWord> {
    let t = text.trim();
    let ks: Vec<i64> = if let Some(body) = t.strip_prefix('[') {
        let body = body
            .strip_suffix(']')
            .ok_or_else(|| Error::Syntax("missing closing ']'".into()))?;
        if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|s| {
                    let s = s.trim();
                    s.parse::<i64>().map_err(|_| Error::Syntax(format!("bad entry '{s}'")))
                })
                .collect::<Result<_>>()?
        }
    } else {
        t.split_whitespace().map(parse_token).collect::<Result<_>>()?
    };
    if ks.contains(&0) {
        return Err(Error::Index { k: 0, max: width.unwrap_or(0).saturating_sub(1) });
    }
    let m = match width {
        Some(m) => m,
        None => ks.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(1) + 1,
    };
    BraidWord::from_signed(m, &ks)
}

fn parse_token(tok: &str) -> Result<i64> {
    let bad = || Error::Syntax(format!("bad token '{tok}'"));
    let rest = tok.strip_prefix('s').ok_or_else(bad)?;
    let (num, exp) = match rest.split_once('^') {
        Some((n, e)) => (n, e),
        None => (rest, "1"),
    };
    if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let k: i64 = num.parse().map_err(|_| bad())?;
    match exp {
        "1" | "+1" => Ok(k),
        "-1" => Ok(-k),
        _ => Err(bad()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Slot {
    Region { region: usize },
    /// Under-edge of a strand; `region` is the region on the strand's left
    /// with respect to its (downward) orientation.
    Under { arc: usize, region: usize },
    Over { arc: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingRegions {
    pub left: usize,
    pub top: usize,
    pub bottom: usize,
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    /// 1-based letter index; the crossing sits between levels `index` and `index+1`.
    pub index: usize,
    pub k: usize,
    pub sign: i8,
    pub over: usize,
    pub under_in: usize,
    pub under_out: usize,
    pub regions: CrossingRegions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub braid: BraidWord,
    pub arcs: Vec<usize>,
    pub regions: Vec<usize>,
    pub crossings: Vec<Crossing>,
    /// Levels 1..=n+1, each with 3m+1 slots.
    pub levels: Vec<Vec<Slot>>,
    pub writhe: i64,
    /// `arc_at[i][s]`: arc on strand position s at level i+1.
    pub arc_at: Vec<Vec<usize>>,
    /// `region_at[i][g]`: region in gap g at level i+1.
    pub region_at: Vec<Vec<usize>>,
}

pub fn closure_diagram(b: &BraidWord) -> Diagram {
    let m = b.width;
    let n = b.len();
    assert!(n > 0, "a knot closure has at least one crossing");

    // Traverse the knot from level 1, position 1; a new arc starts after
    // each under-passage.
    let mut arc_at = vec![vec![0usize; m]; n];
    let mut over = vec![0usize; n];
    let mut under_in = vec![0usize; n];
    let mut out_pos = vec![0usize; n];
    let (mut arc, mut lvl, mut p) = (1usize, 0usize, 0usize);
    loop {
        arc_at[lvl][p] = arc;
        let Letter { k, sign } = b.letters[lvl];
        let k0 = k - 1;
        if p == k0 || p == k0 + 1 {
            let np = if p == k0 { k0 + 1 } else { k0 };
            let is_over = (p == k0 && sign > 0) || (p == k0 + 1 && sign < 0);
            if is_over {
                over[lvl] = arc;
            } else {
                under_in[lvl] = arc;
                out_pos[lvl] = np;
                arc += 1;
            }
            p = np;
        }
        lvl = (lvl + 1) % n;
        if lvl == 0 && p == 0 {
            break;
        }
    }
    debug_assert_eq!(arc, n + 1);
    // The piece after the last under-passage continues arc 1.
    let wrap = |a: usize| if a == n + 1 { 1 } else { a };
    for row in arc_at.iter_mut() {
        for a in row.iter_mut() {
            *a = wrap(*a);
        }
    }
    let over: Vec<usize> = over.into_iter().map(wrap).collect();
    let under_in: Vec<usize> = under_in.into_iter().map(wrap).collect();
    arc_at.push(arc_at[0].clone());

    let region_at = sweep_regions(b);

    let crossings = b
        .letters
        .iter()
        .enumerate()
        .map(|(i, l)| Crossing {
            index: i + 1,
            k: l.k,
            sign: l.sign,
            over: over[i],
            under_in: under_in[i],
            under_out: arc_at[i + 1][out_pos[i]],
            regions: CrossingRegions {
                left: region_at[i][l.k - 1],
                top: region_at[i][l.k],
                bottom: region_at[i + 1][l.k],
                right: region_at[i][l.k + 1],
            },
        })
        .collect();

    let mut d = Diagram {
        braid: b.clone(),
        arcs: (1..=n).collect(),
        regions: (1..=n + 2).collect(),
        crossings,
        levels: Vec::new(),
        writhe: b.writhe(),
        arc_at,
        region_at,
    };
    d.levels = d.layout();
    d
}

/// Regions are numbered gap by gap from the left; within a gap, in order of
/// first appearance from the top. A gap region extends downward until a
/// letter acting on that gap splits it.
fn sweep_regions(b: &BraidWord) -> Vec<Vec<usize>> {
    let m = b.width;
    let n = b.len();
    let mut reg = vec![vec![0usize; m + 1]; n];
    let mut next = 1;
    for g in 0..=m {
        for i in 0..n {
            if reg[i][g] != 0 {
                continue;
            }
            let r = next;
            next += 1;
            let mut j = i;
            while reg[j][g] == 0 {
                reg[j][g] = r;
                if b.letters[j].k == g {
                    break;
                }
                j = (j + 1) % n;
            }
            let mut j = (i + n - 1) % n;
            while b.letters[j].k != g && reg[j][g] == 0 {
                reg[j][g] = r;
                j = (j + n - 1) % n;
            }
        }
    }
    reg.push(reg[0].clone());
    reg
}

impl Diagram {
    pub fn width(&self) -> usize {
        self.braid.width
    }

    pub fn len(&self) -> usize {
        self.braid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.braid.is_empty()
    }

    fn layout(&self) -> Vec<Vec<Slot>> {
        let m = self.width();
        (0..=self.len())
            .map(|i| {
                let mut row = Vec::with_capacity(3 * m + 1);
                for s in 0..m {
                    let arc = self.arc_at[i][s];
                    row.push(Slot::Region { region: self.region_at[i][s] });
                    row.push(Slot::Under { arc, region: self.region_at[i][s + 1] });
                    row.push(Slot::Over { arc });
                }
                row.push(Slot::Region { region: self.region_at[i][m] });
                row
            })
            .collect()
    }

    /// Renumber regions: region r becomes `relabel[r-1]`.
    pub fn with_region_labels(&self, relabel: &[usize]) -> Result<Diagram> {
        let nr = self.regions.len();
        let mut seen = vec![false; nr + 1];
        if relabel.len() != nr {
            return Err(Error::Syntax(format!("relabel has {} entries, need {nr}", relabel.len())));
        }
        for &r in relabel {
            if r == 0 || r > nr || seen[r] {
                return Err(Error::Syntax("region relabel is not a permutation".into()));
            }
            seen[r] = true;
        }
        let f = |r: usize| relabel[r - 1];
        let mut d = self.clone();
        for row in d.region_at.iter_mut() {
            for r in row.iter_mut() {
                *r = f(*r);
            }
        }
        for c in d.crossings.iter_mut() {
            let cr = &mut c.regions;
            *cr = CrossingRegions { left: f(cr.left), top: f(cr.top), bottom: f(cr.bottom), right: f(cr.right) };
        }
        d.levels = d.layout();
        Ok(d)
    }

    /// Crossing indices (0-based) in the order the knot passes under them,
    /// starting with the crossing where arc 1 ends.
    pub fn under_order(&self) -> Vec<usize> {
        let mut order = vec![0; self.len()];
        for (i, c) in self.crossings.iter().enumerate() {
            order[c.under_in - 1] = i;
        }
        order
    }
}

/// One relation per crossing: g_out = g_over^e g_in g_over^-e, returned as
/// the word g_over^e g_in g_over^-e g_out^-1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: usize,
    pub relations: Vec<Word>,
}

pub fn wirtinger_presentation(d: &Diagram) -> Presentation {
    let relations = d
        .crossings
        .iter()
        .map(|c| vec![(c.over, c.sign), (c.under_in, 1), (c.over, -c.sign), (c.under_out, -1)])
        .collect();
    Presentation { generators: d.arcs.len(), relations }
}

/// Blackboard longitude and the null-homologous longitude lambda_bf g1^-w.
pub fn longitude_word(d: &Diagram) -> (Word, Word) {
    let mut bf: Word = d
        .under_order()
        .iter()
        .rev()
        .map(|&i| (d.crossings[i].over, d.crossings[i].sign))
        .collect();
    let lam_bf = bf.clone();
    let w = d.writhe;
    for _ in 0..w.unsigned_abs() {
        bf.push((1, if w > 0 { -1 } else { 1 }));
    }
    (lam_bf, bf)
}

/// Total exponent of each generator in a word.
pub fn exponent_sums(w: &Word, generators: usize) -> Vec<i64> {
    let mut s = vec![0i64; generators];
    for &(g, e) in w {
        s[g - 1] += e as i64;
    }
    s
}
