//! Subset construction and Hopcroft minimization.

use std::collections::{HashMap, VecDeque};

use super::fsa::{Fsa, StateId};
use super::symbol::Symbol;

impl Fsa {
    /// Subset construction. The result is epsilon-free, has at most one arc
    /// per (state, symbol), keeps arcs sorted by symbol, and is trimmed.
    pub fn determinize(&self) -> Fsa {
        if self.deterministic {
            return self.clone();
        }
        let mut out = Fsa::empty();
        out.arcs.clear();
        out.finals.clear();
        let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut queue: VecDeque<Vec<StateId>> = VecDeque::new();

        let start = self.closure([self.start]);
        index.insert(start.clone(), 0);
        out.finals.push(start.iter().any(|&s| self.finals[s as usize]));
        out.arcs.push(Vec::new());
        queue.push_back(start);

        let mut moves: Vec<(Symbol, StateId)> = Vec::new();
        while let Some(subset) = queue.pop_front() {
            let from = index[&subset];
            moves.clear();
            for &s in &subset {
                for &(label, to) in &self.arcs[s as usize] {
                    if let Some(symbol) = label {
                        moves.push((symbol, to));
                    }
                }
            }
            moves.sort_unstable();
            moves.dedup();
            let mut i = 0;
            while i < moves.len() {
                let symbol = moves[i].0;
                let mut j = i;
                while j < moves.len() && moves[j].0 == symbol {
                    j += 1;
                }
                let target = self.closure(moves[i..j].iter().map(|&(_, to)| to));
                let to = match index.get(&target) {
                    Some(&to) => to,
                    None => {
                        let id = out.finals.len() as StateId;
                        out.finals.push(target.iter().any(|&s| self.finals[s as usize]));
                        out.arcs.push(Vec::new());
                        index.insert(target.clone(), id);
                        queue.push_back(target);
                        id
                    }
                };
                out.arcs[from as usize].push((Some(symbol), to));
                i = j;
            }
        }
        out.start = 0;
        out.deterministic = true;
        out.trim()
    }

    /// Minimal deterministic automaton for the same language, with states
    /// numbered in breadth-first order from the start. Two language-equal
    /// inputs minimize to identical automata.
    pub fn minimize(&self) -> Fsa {
        let dfa = self.determinize();
        if dfa.is_empty() {
            return Fsa::empty();
        }
        let n = dfa.num_states();
        let sink = n;
        let symbols: Vec<Symbol> = dfa.symbols().symbols().to_vec();
        let k = symbols.len();
        let symbol_index: HashMap<Symbol, usize> =
            symbols.iter().enumerate().map(|(i, &s)| (s, i)).collect();

        // Complete transition table over the used symbols, with an explicit sink.
        let mut delta = vec![sink as StateId; (n + 1) * k];
        for state in 0..n {
            for &(label, to) in dfa.arcs(state as StateId) {
                let c = symbol_index[&label.expect("deterministic arc")];
                delta[state * k + c] = to;
            }
        }
        let is_final = |s: usize| s < n && dfa.is_final(s as StateId);

        // inverse[c][t] = states with a c-transition into t
        let mut inverse: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); n + 1]; k];
        for state in 0..=n {
            for c in 0..k {
                inverse[c][delta[state * k + c] as usize].push(state as u32);
            }
        }

        let mut block_of = vec![0usize; n + 1];
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        let finals: Vec<u32> = (0..=n).filter(|&s| is_final(s)).map(|s| s as u32).collect();
        let others: Vec<u32> = (0..=n).filter(|&s| !is_final(s)).map(|s| s as u32).collect();
        for part in [finals, others] {
            if !part.is_empty() {
                let id = blocks.len();
                for &s in &part {
                    block_of[s as usize] = id;
                }
                blocks.push(part);
            }
        }

        let mut pending: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
        let mut worklist: Vec<(usize, usize)> = Vec::new();
        let seed = if blocks.len() == 2 && blocks[1].len() < blocks[0].len() { 1 } else { 0 };
        for c in 0..k {
            worklist.push((seed, c));
            pending[seed][c] = true;
        }

        let mut marked: Vec<Vec<u32>> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();
        while let Some((splitter, c)) = worklist.pop() {
            pending[splitter][c] = false;
            let mut preimage: Vec<u32> = Vec::new();
            for &t in &blocks[splitter] {
                preimage.extend_from_slice(&inverse[c][t as usize]);
            }
            if preimage.is_empty() {
                continue;
            }
            marked.resize_with(blocks.len(), Vec::new);
            touched.clear();
            for &s in &preimage {
                let b = block_of[s as usize];
                if marked[b].is_empty() {
                    touched.push(b);
                }
                marked[b].push(s);
            }
            for &b in &touched {
                let hit = std::mem::take(&mut marked[b]);
                if hit.len() == blocks[b].len() {
                    continue;
                }
                let new_id = blocks.len();
                let mut in_hit = vec![false; 0];
                in_hit.resize(n + 1, false);
                for &s in &hit {
                    in_hit[s as usize] = true;
                }
                let rest: Vec<u32> =
                    blocks[b].iter().copied().filter(|&s| !in_hit[s as usize]).collect();
                for &s in &hit {
                    block_of[s as usize] = new_id;
                }
                blocks[b] = rest;
                blocks.push(hit);
                pending.push(vec![false; k]);
                for a in 0..k {
                    if pending[b][a] {
                        pending[new_id][a] = true;
                        worklist.push((new_id, a));
                    } else {
                        let smaller =
                            if blocks[new_id].len() <= blocks[b].len() { new_id } else { b };
                        pending[smaller][a] = true;
                        worklist.push((smaller, a));
                    }
                }
            }
        }

        // The sink's block holds exactly the dead states; drop it.
        let dead = block_of[sink];
        let mut remap = vec![u32::MAX; blocks.len()];
        let mut order: Vec<usize> = Vec::new();
        let start_block = block_of[dfa.start() as usize];
        remap[start_block] = 0;
        order.push(start_block);
        let mut out = Fsa::empty();
        out.arcs.clear();
        out.finals.clear();
        let mut i = 0;
        while i < order.len() {
            let b = order[i];
            let repr = blocks[b][0] as usize;
            out.finals.push(is_final(repr));
            let mut arcs = Vec::new();
            for (c, &symbol) in symbols.iter().enumerate() {
                let tb = block_of[delta[repr * k + c] as usize];
                if tb == dead {
                    continue;
                }
                if remap[tb] == u32::MAX {
                    remap[tb] = order.len() as u32;
                    order.push(tb);
                }
                arcs.push((Some(symbol), remap[tb]));
            }
            out.arcs.push(arcs);
            i += 1;
        }
        out.start = 0;
        out.deterministic = true;
        out
    }
}
