//! Memoized breadth-first rank tables.
//!
//! A single breadth-first closure of the rank-one generator set labels every
//! tensor in the space with its exact rank (or symmetric rank); lookups are
//! then O(1). This is the batched form of iterative deepening: level k holds
//! exactly the tensors needing k generators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

use super::space::{general_generators, FfShape, GeneralGen, SymGen, SymSpace};
use super::Budget;

pub const UNREACHED: u8 = u8::MAX;

#[derive(Debug)]
pub struct RankTable {
    pub shape: FfShape,
    pub gens: Vec<GeneralGen>,
    /// Rank of every dense code.
    pub table: Vec<u8>,
}

#[derive(Debug)]
pub struct SrankTable {
    pub sym: SymSpace,
    pub gens: Vec<SymGen>,
    /// Symmetric rank of every coordinate code; UNREACHED marks tensors that
    /// are not a sum of symmetric rank-one tensors at all.
    pub table: Vec<u8>,
}

fn bfs_closure(
    size: u64,
    digits_len: usize,
    decode: impl Fn(u64, &mut [u8]),
    encode: impl Fn(&[u8]) -> u64,
    gen_digits: &[Vec<u8>],
    add: impl Fn(&[u8], &[u8], &mut [u8]),
) -> Vec<u8> {
    let mut table = vec![UNREACHED; size as usize];
    table[0] = 0;
    let mut frontier: Vec<u64> = vec![0];
    let mut level = 0u8;
    let mut cur = vec![0u8; digits_len];
    let mut next = vec![0u8; digits_len];
    while !frontier.is_empty() {
        level += 1;
        let mut upcoming = Vec::new();
        for &code in &frontier {
            decode(code, &mut cur);
            for g in gen_digits {
                add(&cur, g, &mut next);
                let nc = encode(&next) as usize;
                if table[nc] == UNREACHED {
                    table[nc] = level;
                    upcoming.push(nc as u64);
                }
            }
        }
        frontier = upcoming;
    }
    table
}

impl RankTable {
    fn build(shape: FfShape, budget: &Budget) -> Result<RankTable> {
        let size = shape
            .space_size()
            .filter(|&s| s <= budget.table_entries)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "dense space {}^{} exceeds the table budget",
                    shape.p,
                    shape.entry_count()
                ))
            })?;
        let gens = general_generators(&shape);
        let gd: Vec<Vec<u8>> = gens.iter().map(|g| g.dense.clone()).collect();
        let table = bfs_closure(
            size,
            shape.entry_count(),
            |c, out| shape.decode(c, out),
            |d| shape.encode(d),
            &gd,
            |a, b, out| shape.add_into(a, b, out),
        );
        Ok(RankTable { shape, gens, table })
    }

    pub fn rank_of(&self, digits: &[u8]) -> u8 {
        self.table[self.shape.encode(digits) as usize]
    }

    /// Walk back one generator at a time to extract a witness of minimal
    /// length, verifying admissibility along the way.
    pub fn witness(&self, digits: &[u8]) -> Vec<&GeneralGen> {
        let mut cur = digits.to_vec();
        let mut need = self.rank_of(digits);
        let mut out = Vec::new();
        let mut tmp = vec![0u8; digits.len()];
        while need > 0 {
            let mut advanced = false;
            for g in &self.gens {
                self.shape.sub_into(&cur, &g.dense, &mut tmp);
                if self.table[self.shape.encode(&tmp) as usize] == need - 1 {
                    out.push(g);
                    cur.copy_from_slice(&tmp);
                    need -= 1;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "BFS level structure broken");
        }
        out
    }
}

impl SrankTable {
    fn build(shape: FfShape, budget: &Budget) -> Result<SrankTable> {
        let sym = SymSpace::new(shape);
        let size = sym
            .space_size()
            .filter(|&s| s <= budget.table_entries)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "symmetric space {}^{} exceeds the table budget",
                    shape.p,
                    sym.coord_count()
                ))
            })?;
        let gens = sym.symmetric_generators();
        let gd: Vec<Vec<u8>> = gens.iter().map(|g| g.coords.clone()).collect();
        let table = bfs_closure(
            size,
            sym.coord_count(),
            |c, out| sym.decode(c, out),
            |d| sym.encode(d),
            &gd,
            |a, b, out| sym.add_into(a, b, out),
        );
        Ok(SrankTable { sym, gens, table })
    }

    pub fn srank_of_coords(&self, coords: &[u8]) -> Option<u8> {
        let v = self.table[self.sym.encode(coords) as usize];
        if v == UNREACHED {
            None
        } else {
            Some(v)
        }
    }

    pub fn witness(&self, coords: &[u8]) -> Option<Vec<&SymGen>> {
        let mut need = self.srank_of_coords(coords)?;
        let mut cur = coords.to_vec();
        let mut out = Vec::new();
        let p = self.sym.shape.p as u8;
        let mut tmp = vec![0u8; coords.len()];
        while need > 0 {
            let mut advanced = false;
            for g in &self.gens {
                for i in 0..cur.len() {
                    tmp[i] = if cur[i] >= g.coords[i] {
                        cur[i] - g.coords[i]
                    } else {
                        cur[i] + p - g.coords[i]
                    };
                }
                if self.table[self.sym.encode(&tmp) as usize] == need - 1 {
                    out.push(g);
                    cur.copy_from_slice(&tmp);
                    need -= 1;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "BFS level structure broken");
        }
        Some(out)
    }
}

type RankCache = Mutex<HashMap<FfShape, Arc<RankTable>>>;
type SrankCache = Mutex<HashMap<FfShape, Arc<SrankTable>>>;

static RANK_TABLES: OnceLock<RankCache> = OnceLock::new();
static SRANK_TABLES: OnceLock<SrankCache> = OnceLock::new();

pub fn rank_table(shape: FfShape, budget: &Budget) -> Result<Arc<RankTable>> {
    let cache = RANK_TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&shape) {
        return Ok(t.clone());
    }
    let built = Arc::new(RankTable::build(shape, budget)?);
    cache.lock().unwrap().insert(shape, built.clone());
    Ok(built)
}

pub fn srank_table(shape: FfShape, budget: &Budget) -> Result<Arc<SrankTable>> {
    let cache = SRANK_TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&shape) {
        return Ok(t.clone());
    }
    let built = Arc::new(SrankTable::build(shape, budget)?);
    cache.lock().unwrap().insert(shape, built.clone());
    Ok(built)
}
