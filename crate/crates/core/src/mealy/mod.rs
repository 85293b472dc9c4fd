//! Invertible Mealy automata acting on the rooted tree `X*`.
//!
//! A [`Group`] holds a presentation (root permutation and section words for
//! every generator) together with an append-only table of minimized
//! automata.  [`Element`]s are words over generators and their inverses;
//! canonicalization assigns each element a [`StateId`] in that table, so
//! two elements are equal exactly when their ids coincide.

pub mod bundled;
mod machine;
mod parse;

pub use machine::{MealyMachine, Portrait};
pub use parse::{parse_group, parse_word};

use crate::error::{Error, Result};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Mutex, MutexGuard};

/// Default bound on the number of states explored while canonicalizing.
pub const DEFAULT_CAP: usize = 10_000;

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

/// A freely reduced word over generators; the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    word: Vec<Letter>,
}

impl Element {
    pub fn identity() -> Element {
        Element::default()
    }

    pub fn generator(gen: u32) -> Element {
        Element {
            word: vec![Letter { gen, inv: false }],
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Element {
        let mut word: Vec<Letter> = Vec::with_capacity(letters.len());
        for l in letters {
            if word.last() == Some(&l.inverse()) {
                word.pop();
            } else {
                word.push(l);
            }
        }
        Element { word }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.word
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.word
    }

    pub fn is_empty_word(&self) -> bool {
        self.word.is_empty()
    }

    /// The product `self · other`, acting as `other` first.
    pub fn compose(&self, other: &Element) -> Element {
        let mut w = self.word.clone();
        w.extend_from_slice(&other.word);
        Element::from_letters(w)
    }

    pub fn inverse(&self) -> Element {
        Element {
            word: self.word.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Element {
        Element::from_letters(self.word.repeat(k))
    }
}

/// Index of a minimized automaton state in a group's table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub const IDENTITY: StateId = StateId(0);
}

#[derive(Default)]
struct Table {
    perm: Vec<Vec<u8>>,
    sections: Vec<Vec<StateId>>,
    rep: Vec<Vec<Letter>>,
    by_key: HashMap<Vec<u32>, StateId>,
    by_word: HashMap<Vec<Letter>, StateId>,
    products: HashMap<(StateId, StateId), StateId>,
    inverses: HashMap<StateId, StateId>,
}

/// A self-similar group given by wreath recursions with word-valued sections.
pub struct Group {
    d: usize,
    names: Vec<String>,
    perms: Vec<Vec<u8>>,
    inv_perms: Vec<Vec<u8>>,
    sections: Vec<Vec<Vec<Letter>>>,
    cap: usize,
    table: Mutex<Table>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("d", &self.d)
            .field("names", &self.names)
            .finish()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Word(Vec<Letter>),
    Known(StateId),
}

impl Group {
    /// Builds a group from generator names, root permutations (`perm[x]` is
    /// the image of `x`) and section words.
    pub fn new(
        d: usize,
        names: Vec<String>,
        perms: Vec<Vec<u8>>,
        sections: Vec<Vec<Vec<Letter>>>,
    ) -> Result<Group> {
        if d < 2 {
            return Err(Error::Dimension("alphabet needs at least two letters".into()));
        }
        if names.len() != perms.len() || names.len() != sections.len() {
            return Err(Error::Dimension("one permutation and section list per generator".into()));
        }
        let mut inv_perms = Vec::new();
        for perm in &perms {
            let mut inv = vec![u8::MAX; d];
            if perm.len() != d {
                return Err(Error::Dimension("root permutation has wrong length".into()));
            }
            for (x, &y) in perm.iter().enumerate() {
                if (y as usize) >= d || inv[y as usize] != u8::MAX {
                    return Err(Error::Dimension("root action is not a permutation".into()));
                }
                inv[y as usize] = x as u8;
            }
            inv_perms.push(inv);
        }
        for secs in &sections {
            if secs.len() != d {
                return Err(Error::Dimension("wrong number of sections".into()));
            }
            for w in secs {
                if w.iter().any(|l| l.gen as usize >= names.len()) {
                    return Err(Error::Dimension("section refers to unknown generator".into()));
                }
            }
        }
        let sections = sections
            .into_iter()
            .map(|ws| ws.into_iter().map(|w| Element::from_letters(w).word).collect())
            .collect();
        let group = Group {
            d,
            names,
            perms,
            inv_perms,
            sections,
            cap: DEFAULT_CAP,
            table: Mutex::new(Table::default()),
        };
        {
            let mut t = group.lock();
            let id = StateId(0);
            t.perm.push((0..d as u8).collect());
            t.sections.push(vec![id; d]);
            t.rep.push(Vec::new());
            let key = identity_key(d);
            t.by_key.insert(key, id);
            t.by_word.insert(Vec::new(), id);
        }
        Ok(group)
    }

    /// Replaces the closure cap used by canonicalization.
    pub fn with_cap(mut self, cap: usize) -> Group {
        self.cap = cap.max(1);
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator(&self, name: &str) -> Result<Element> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Element::generator(i as u32))
            .ok_or_else(|| Error::UndefinedName(name.to_string()))
    }

    pub fn generators(&self) -> Vec<Element> {
        (0..self.names.len() as u32).map(Element::generator).collect()
    }

    /// Parses an element expression such as `ab'(cd)^2`.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        parse_word(text, &self.names).map(Element::from_letters)
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.word.is_empty() {
            return "1".to_string();
        }
        e.word
            .iter()
            .map(|l| {
                let n = &self.names[l.gen as usize];
                if l.inv {
                    format!("{n}'")
                } else {
                    n.clone()
                }
            })
            .collect()
    }

    fn lock(&self) -> MutexGuard<'_, Table> {
        self.table.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn check_letters(&self, w: &[u8]) -> Result<()> {
        match w.iter().find(|&&x| x as usize >= self.d) {
            Some(&x) => Err(Error::LetterOutOfRange {
                letter: x as usize,
                d: self.d,
            }),
            None => Ok(()),
        }
    }

    fn letter_image(&self, l: Letter, x: u8) -> u8 {
        if l.inv {
            self.inv_perms[l.gen as usize][x as usize]
        } else {
            self.perms[l.gen as usize][x as usize]
        }
    }

    fn letter_section(&self, l: Letter, x: u8) -> Vec<Letter> {
        if l.inv {
            let y = self.inv_perms[l.gen as usize][x as usize];
            Element {
                word: self.sections[l.gen as usize][y as usize].clone(),
            }
            .inverse()
            .word
        } else {
            self.sections[l.gen as usize][x as usize].clone()
        }
    }

    fn word_image(&self, w: &[Letter], x: u8) -> u8 {
        w.iter().rev().fold(x, |y, &l| self.letter_image(l, y))
    }

    fn word_perm(&self, w: &[Letter]) -> Vec<u8> {
        (0..self.d as u8).map(|x| self.word_image(w, x)).collect()
    }

    /// `(g1 g2)|_x = g1|_{g2(x)} g2|_x`, applied letter by letter from the right.
    fn word_section(&self, w: &[Letter], x: u8) -> Vec<Letter> {
        let mut parts: Vec<Vec<Letter>> = Vec::with_capacity(w.len());
        let mut y = x;
        for &l in w.iter().rev() {
            parts.push(self.letter_section(l, y));
            y = self.letter_image(l, y);
        }
        parts.reverse();
        Element::from_letters(parts.concat()).word
    }

    /// Image of a finite word under `g`.
    pub fn act(&self, g: &Element, w: &[u8]) -> Result<Vec<u8>> {
        self.check_letters(w)?;
        let mut state = g.word.clone();
        let mut out = Vec::with_capacity(w.len());
        for &x in w {
            out.push(self.word_image(&state, x));
            state = self.word_section(&state, x);
        }
        Ok(out)
    }

    /// The section `g|_v`.
    pub fn section(&self, g: &Element, v: &[u8]) -> Result<Element> {
        self.check_letters(v)?;
        let mut state = g.word.clone();
        for &x in v {
            state = self.word_section(&state, x);
        }
        Ok(Element { word: state })
    }

    /// Root permutation and first-level sections: `g = π·(g|_0, .., g|_{d-1})`.
    pub fn wreath_decompose(&self, g: &Element) -> (Vec<u8>, Vec<Element>) {
        let perm = self.word_perm(&g.word);
        let secs = (0..self.d as u8)
            .map(|x| Element {
                word: self.word_section(&g.word, x),
            })
            .collect();
        (perm, secs)
    }

    /// Labels of the portrait of `g` on levels `0..n`.
    pub fn portrait(&self, g: &Element, n: usize) -> Portrait {
        let mut labels = Vec::with_capacity(n);
        let mut frontier = vec![g.word.clone()];
        for level in 0..n {
            labels.push(frontier.iter().map(|w| self.word_perm(w)).collect());
            if level + 1 < n {
                // vertex index: x_1 least significant
                let mut next = vec![Vec::new(); frontier.len() * self.d];
                for (i, w) in frontier.iter().enumerate() {
                    for x in 0..self.d {
                        next[i + frontier.len() * x] = self.word_section(w, x as u8);
                    }
                }
                frontier = next;
            }
        }
        Portrait::new(self.d, labels)
    }

    /// Canonical id of `g`, exploring at most the group's cap of states.
    pub fn canonical(&self, g: &Element) -> Result<StateId> {
        self.canonical_with_cap(g, self.cap)
    }

    pub fn canonical_with_cap(&self, g: &Element, cap: usize) -> Result<StateId> {
        let mut table = self.lock();
        self.intern_word(&mut table, &g.word, cap)
    }

    fn intern_word(&self, table: &mut Table, word: &[Letter], cap: usize) -> Result<StateId> {
        if let Some(&id) = table.by_word.get(word) {
            return Ok(id);
        }
        let mut nodes: Vec<Node> = Vec::new();
        let mut index: HashMap<Node, usize> = HashMap::new();
        let mut perms: Vec<Vec<u8>> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let root = Node::Word(word.to_vec());
        index.insert(root.clone(), 0);
        nodes.push(root);
        queue.push_back(0usize);
        let mut words_seen = 1usize;
        while let Some(i) = queue.pop_front() {
            let (perm, children): (Vec<u8>, Vec<Node>) = match &nodes[i] {
                Node::Known(id) => (
                    table.perm[id.0 as usize].clone(),
                    table.sections[id.0 as usize].iter().map(|&s| Node::Known(s)).collect(),
                ),
                Node::Word(w) => (
                    self.word_perm(w),
                    (0..self.d as u8)
                        .map(|x| {
                            let s = self.word_section(w, x);
                            match table.by_word.get(&s) {
                                Some(&id) => Node::Known(id),
                                None => Node::Word(s),
                            }
                        })
                        .collect(),
                ),
            };
            let mut row = Vec::with_capacity(self.d);
            for c in children {
                let j = match index.get(&c) {
                    Some(&j) => j,
                    None => {
                        if matches!(c, Node::Word(_)) {
                            words_seen += 1;
                            if words_seen > cap {
                                return Err(Error::CapExceeded(cap));
                            }
                        }
                        let j = nodes.len();
                        index.insert(c.clone(), j);
                        nodes.push(c);
                        queue.push_back(j);
                        j
                    }
                };
                row.push(j);
            }
            perms.push(perm);
            succ.push(row);
        }
        let class = minimize(&perms, &succ);
        let nclass = class.iter().copied().max().map_or(0, |m| m + 1);
        let mut class_perm = vec![Vec::new(); nclass];
        let mut class_succ = vec![Vec::new(); nclass];
        let mut class_id: Vec<Option<StateId>> = vec![None; nclass];
        let mut class_rep: Vec<Option<Vec<Letter>>> = vec![None; nclass];
        for (i, node) in nodes.iter().enumerate() {
            let c = class[i];
            if class_perm[c].is_empty() {
                class_perm[c] = perms[i].clone();
                class_succ[c] = succ[i].iter().map(|&j| class[j]).collect();
            }
            match node {
                Node::Known(id) => class_id[c] = Some(*id),
                Node::Word(w) => {
                    if class_rep[c].as_ref().is_none_or(|r| w.len() < r.len()) {
                        class_rep[c] = Some(w.clone());
                    }
                }
            }
        }
        let mut fresh = Vec::new();
        for c in 0..nclass {
            if class_id[c].is_some() {
                continue;
            }
            let key = canonical_key(c, &class_perm, &class_succ);
            if let Some(&id) = table.by_key.get(&key) {
                class_id[c] = Some(id);
            } else {
                let id = StateId(table.perm.len() as u32);
                table.perm.push(class_perm[c].clone());
                table.sections.push(Vec::new());
                table.rep.push(class_rep[c].clone().unwrap_or_default());
                table.by_key.insert(key, id);
                class_id[c] = Some(id);
                fresh.push(c);
            }
        }
        for c in fresh {
            let id = class_id[c].expect("assigned");
            table.sections[id.0 as usize] = class_succ[c]
                .iter()
                .map(|&k| class_id[k].expect("assigned"))
                .collect();
        }
        for (i, node) in nodes.into_iter().enumerate() {
            if let Node::Word(w) = node {
                table.by_word.insert(w, class_id[class[i]].expect("assigned"));
            }
        }
        Ok(class_id[class[0]].expect("assigned"))
    }

    /// Structural equality: `g` and `h` act identically on `X*`.
    pub fn equal(&self, g: &Element, h: &Element) -> Result<bool> {
        Ok(self.canonical(g)? == self.canonical(h)?)
    }

    pub fn is_identity(&self, g: &Element) -> Result<bool> {
        Ok(self.canonical(g)? == StateId::IDENTITY)
    }

    /// The distinct sections `{g|_v : v ∈ X*}`.
    pub fn states_closure(&self, g: &Element, cap: usize) -> Result<Vec<Element>> {
        let id = self.canonical_with_cap(g, cap)?;
        let ids = self.closure_ids(id);
        if ids.len() > cap {
            return Err(Error::CapExceeded(cap));
        }
        Ok(ids.into_iter().map(|i| self.element_of(i)).collect())
    }

    /// Root permutation and sections of `g` must all be powers of the cycle `(0 1 .. d-1)`.
    pub fn is_in_kp(&self, g: &Element) -> Result<bool> {
        let id = self.canonical(g)?;
        Ok(self
            .closure_ids(id)
            .into_iter()
            .all(|s| cycle_exponent(&self.perm_of(s)).is_some()))
    }

    // ---- id-level access ----

    pub fn perm_of(&self, id: StateId) -> Vec<u8> {
        self.lock().perm[id.0 as usize].clone()
    }

    pub fn section_of(&self, id: StateId, x: u8) -> StateId {
        self.lock().sections[id.0 as usize][x as usize]
    }

    pub fn sections_of(&self, id: StateId) -> Vec<StateId> {
        self.lock().sections[id.0 as usize].clone()
    }

    /// A representative word for the id.
    pub fn element_of(&self, id: StateId) -> Element {
        Element {
            word: self.lock().rep[id.0 as usize].clone(),
        }
    }

    /// Ids reachable from `id` by sections, in breadth-first order.
    pub fn closure_ids(&self, id: StateId) -> Vec<StateId> {
        let t = self.lock();
        let mut seen = HashMap::new();
        let mut order = vec![id];
        seen.insert(id, ());
        let mut i = 0;
        while i < order.len() {
            for &s in &t.sections[order[i].0 as usize] {
                if seen.insert(s, ()).is_none() {
                    order.push(s);
                }
            }
            i += 1;
        }
        order
    }

    /// Canonical id of the product `a·b`.
    pub fn mul_ids(&self, a: StateId, b: StateId) -> Result<StateId> {
        if a == StateId::IDENTITY {
            return Ok(b);
        }
        if b == StateId::IDENTITY {
            return Ok(a);
        }
        let mut t = self.lock();
        if let Some(&id) = t.products.get(&(a, b)) {
            return Ok(id);
        }
        let mut w = t.rep[a.0 as usize].clone();
        w.extend_from_slice(&t.rep[b.0 as usize]);
        let w = Element::from_letters(w).word;
        let id = self.intern_word(&mut t, &w, self.cap)?;
        t.products.insert((a, b), id);
        Ok(id)
    }

    pub fn inverse_id(&self, a: StateId) -> Result<StateId> {
        let mut t = self.lock();
        if let Some(&id) = t.inverses.get(&a) {
            return Ok(id);
        }
        let w = Element {
            word: t.rep[a.0 as usize].clone(),
        }
        .inverse()
        .word;
        let id = self.intern_word(&mut t, &w, self.cap)?;
        t.inverses.insert(a, id);
        t.inverses.insert(id, a);
        Ok(id)
    }

    /// Image of a word under the state `id`.
    pub fn act_id(&self, id: StateId, w: &[u8]) -> Result<Vec<u8>> {
        self.check_letters(w)?;
        let t = self.lock();
        let mut s = id;
        Ok(w.iter()
            .map(|&x| {
                let y = t.perm[s.0 as usize][x as usize];
                s = t.sections[s.0 as usize][x as usize];
                y
            })
            .collect())
    }

    /// Explicit Mealy machine on the union of the closures of `elements`.
    ///
    /// Returns the machine and the state index of each input element.
    pub fn machine(&self, elements: &[Element]) -> Result<(MealyMachine, Vec<usize>)> {
        let mut ids = Vec::new();
        for e in elements {
            ids.push(self.canonical(e)?);
        }
        let mut order: Vec<StateId> = Vec::new();
        let mut pos: HashMap<StateId, usize> = HashMap::new();
        for &id in &ids {
            for s in self.closure_ids(id) {
                if let std::collections::hash_map::Entry::Vacant(e) = pos.entry(s) {
                    e.insert(order.len());
                    order.push(s);
                }
            }
        }
        let names = order
            .iter()
            .map(|&s| self.format_element(&self.element_of(s)))
            .collect();
        let next = order
            .iter()
            .map(|&s| self.sections_of(s).iter().map(|t| pos[t]).collect())
            .collect();
        let out = order.iter().map(|&s| self.perm_of(s)).collect();
        let m = MealyMachine::new(self.d, names, next, out)?;
        Ok((m, ids.iter().map(|id| pos[id]).collect()))
    }

    /// Mealy machine with the identity and every generator's closure.
    pub fn generator_machine(&self) -> Result<(MealyMachine, Vec<usize>)> {
        let mut elems = vec![Element::identity()];
        elems.extend(self.generators());
        let (m, idx) = self.machine(&elems)?;
        Ok((m, idx[1..].to_vec()))
    }
}

/// Exponent `e` with `perm(x) = x + e mod d`, if any.
pub fn cycle_exponent(perm: &[u8]) -> Option<u8> {
    let d = perm.len();
    let e = perm[0] as usize;
    (0..d)
        .all(|x| perm[x] as usize == (x + e) % d)
        .then_some(e as u8)
}

fn identity_key(d: usize) -> Vec<u32> {
    let mut key: Vec<u32> = (0..d as u32).collect();
    key.extend(std::iter::repeat_n(0, d));
    key
}

/// Moore-style partition refinement; returns the class of every state.
fn minimize(perms: &[Vec<u8>], succ: &[Vec<usize>]) -> Vec<usize> {
    let n = perms.len();
    let mut class = vec![0usize; n];
    let mut ids: HashMap<&[u8], usize> = HashMap::new();
    for i in 0..n {
        let next = ids.len();
        class[i] = *ids.entry(perms[i].as_slice()).or_insert(next);
    }
    let mut count = ids.len();
    loop {
        let mut sig: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next_class = vec![0usize; n];
        for i in 0..n {
            let mut key = Vec::with_capacity(succ[i].len() + 1);
            key.push(class[i]);
            key.extend(succ[i].iter().map(|&j| class[j]));
            let fresh = sig.len();
            next_class[i] = *sig.entry(key).or_insert(fresh);
        }
        let new_count = sig.len();
        class = next_class;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Breadth-first encoding of the minimized automaton reachable from `start`.
fn canonical_key(start: usize, perm: &[Vec<u8>], succ: &[Vec<usize>]) -> Vec<u32> {
    let mut num: HashMap<usize, u32> = HashMap::new();
    let mut order = vec![start];
    num.insert(start, 0);
    let mut i = 0;
    while i < order.len() {
        for &s in &succ[order[i]] {
            if let std::collections::hash_map::Entry::Vacant(e) = num.entry(s) {
                e.insert(order.len() as u32);
                order.push(s);
            }
        }
        i += 1;
    }
    let mut key = Vec::new();
    for &c in &order {
        key.extend(perm[c].iter().map(|&y| y as u32));
        key.extend(succ[c].iter().map(|s| num[s]));
    }
    key
}
