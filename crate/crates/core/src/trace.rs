//! Raw run history: every chain's parameter at every iteration, local-move
//! acceptance flags and the exchange log.
//!
//! Burn-in and thinning are applied on extraction, never at record time.

use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::model::{ChainState, ParameterVector};

const MAGIC: &[u8; 8] = b"ABCPTRC1";

/// One proposed exchange between chains `i < j` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeEvent {
    pub iteration: u32,
    pub i: u16,
    pub j: u16,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    model: String,
    parameter_names: Vec<String>,
    tolerances: Vec<f64>,
    iterations: usize,
    thetas: Vec<Vec<f64>>,
    local_accepts: Vec<Vec<bool>>,
    exchanges: Vec<ExchangeEvent>,
    skipped_exchanges: u64,
}

impl Trace {
    pub fn new(model: &str, parameter_names: Vec<String>, tolerances: Vec<f64>) -> Self {
        let n = tolerances.len();
        Self {
            model: model.to_owned(),
            parameter_names,
            tolerances,
            iterations: 0,
            thetas: vec![Vec::new(); n],
            local_accepts: vec![Vec::new(); n],
            exchanges: Vec::new(),
            skipped_exchanges: 0,
        }
    }

    pub(crate) fn reserve(&mut self, iterations: usize) {
        let dim = self.dim();
        for (t, a) in self.thetas.iter_mut().zip(&mut self.local_accepts) {
            t.reserve(iterations * dim);
            a.reserve(iterations);
        }
    }

    pub(crate) fn record_iteration<D>(&mut self, states: &[ChainState<D>], accepted: &[bool]) {
        for (c, state) in states.iter().enumerate() {
            self.thetas[c].extend_from_slice(&state.theta);
            self.local_accepts[c].push(accepted[c]);
        }
        self.iterations += 1;
    }

    pub(crate) fn push_exchange(&mut self, event: ExchangeEvent) {
        debug_assert!(event.i < event.j);
        self.exchanges.push(event);
    }

    pub(crate) fn add_skipped(&mut self, count: u64) {
        self.skipped_exchanges += count;
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    pub fn tolerances(&self) -> &[f64] {
        &self.tolerances
    }

    pub fn n_chains(&self) -> usize {
        self.tolerances.len()
    }

    pub fn dim(&self) -> usize {
        self.parameter_names.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_empty(&self) -> bool {
        self.iterations == 0
    }

    /// Parameter of `chain` after iteration `t` (zero-based).
    pub fn theta(&self, chain: usize, t: usize) -> &[f64] {
        let d = self.dim();
        &self.thetas[chain][t * d..(t + 1) * d]
    }

    pub fn local_accepts(&self, chain: usize) -> &[bool] {
        &self.local_accepts[chain]
    }

    pub fn exchanges(&self) -> &[ExchangeEvent] {
        &self.exchanges
    }

    /// Exchange proposals that found no ring with two or more chains.
    pub fn skipped_exchanges(&self) -> u64 {
        self.skipped_exchanges
    }

    /// Post-burn-in samples of `chain`, keeping every `thin`-th.
    pub fn samples(&self, chain: usize, burn_in: usize, thin: usize) -> Vec<ParameterVector> {
        (burn_in..self.iterations)
            .step_by(thin.max(1))
            .map(|t| ParameterVector::new(self.theta(chain, t).to_vec()))
            .collect()
    }

    /// Coordinate `k` of `chain` as a series, after burn-in and thinning.
    pub fn component(&self, chain: usize, k: usize, burn_in: usize, thin: usize) -> Vec<f64> {
        let d = self.dim();
        (burn_in..self.iterations)
            .step_by(thin.max(1))
            .map(|t| self.thetas[chain][t * d + k])
            .collect()
    }

    /// Compact little-endian binary encoding.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        write_str(&mut w, &self.model)?;
        w.write_all(&(self.parameter_names.len() as u32).to_le_bytes())?;
        for name in &self.parameter_names {
            write_str(&mut w, name)?;
        }
        w.write_all(&(self.tolerances.len() as u32).to_le_bytes())?;
        for e in &self.tolerances {
            w.write_all(&e.to_le_bytes())?;
        }
        w.write_all(&(self.iterations as u64).to_le_bytes())?;
        for chain in &self.thetas {
            let bytes: Vec<u8> = chain.iter().flat_map(|v| v.to_le_bytes()).collect();
            w.write_all(&bytes)?;
        }
        for flags in &self.local_accepts {
            let bytes: Vec<u8> = flags.iter().map(|&a| u8::from(a)).collect();
            w.write_all(&bytes)?;
        }
        w.write_all(&(self.exchanges.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.exchanges.len() * 9);
        for e in &self.exchanges {
            buf.extend_from_slice(&e.iteration.to_le_bytes());
            buf.extend_from_slice(&e.i.to_le_bytes());
            buf.extend_from_slice(&e.j.to_le_bytes());
            buf.push(u8::from(e.accepted));
        }
        w.write_all(&buf)?;
        w.write_all(&self.skipped_exchanges.to_le_bytes())?;
        w.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_binary(&mut out).expect("writing to memory");
        out
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| Error::TraceFormat(e.to_string()))?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(8)? != MAGIC {
            return Err(Error::TraceFormat("not a trace file (bad magic)".into()));
        }
        let model = cur.string()?;
        let n_params = cur.u32()? as usize;
        let parameter_names = (0..n_params).map(|_| cur.string()).collect::<Result<Vec<_>>>()?;
        let n_chains = cur.u32()? as usize;
        let tolerances = (0..n_chains).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        let iterations = cur.u64()? as usize;
        let mut thetas = Vec::with_capacity(n_chains);
        for _ in 0..n_chains {
            let raw = cur.take(iterations * n_params * 8)?;
            thetas.push(
                raw.chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            );
        }
        let mut local_accepts = Vec::with_capacity(n_chains);
        for _ in 0..n_chains {
            local_accepts.push(cur.take(iterations)?.iter().map(|&b| b != 0).collect());
        }
        let n_ex = cur.u64()? as usize;
        let raw = cur.take(n_ex * 9)?;
        let exchanges = raw
            .chunks_exact(9)
            .map(|c| ExchangeEvent {
                iteration: u32::from_le_bytes(c[0..4].try_into().expect("4 bytes")),
                i: u16::from_le_bytes(c[4..6].try_into().expect("2 bytes")),
                j: u16::from_le_bytes(c[6..8].try_into().expect("2 bytes")),
                accepted: c[8] != 0,
            })
            .collect();
        let skipped_exchanges = cur.u64()?;
        if cur.pos != bytes.len() {
            return Err(Error::TraceFormat("trailing bytes after trace".into()));
        }
        Ok(Self {
            model,
            parameter_names,
            tolerances,
            iterations,
            thetas,
            local_accepts,
            exchanges,
            skipped_exchanges,
        })
    }

    /// One row per (iteration, chain): `iteration,chain,<params>,accepted`.
    /// Chains and iterations are labelled from 1.
    pub fn write_states_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "iteration,chain")?;
        for name in &self.parameter_names {
            write!(w, ",{name}")?;
        }
        writeln!(w, ",accepted")?;
        for t in 0..self.iterations {
            for c in 0..self.n_chains() {
                write!(w, "{},{}", t + 1, c + 1)?;
                for v in self.theta(c, t) {
                    write!(w, ",{v}")?;
                }
                writeln!(w, ",{}", u8::from(self.local_accepts[c][t]))?;
            }
        }
        w.flush()
    }

    /// Exchange log as `iteration,chain_i,chain_j,accepted` (labels from 1).
    pub fn write_exchanges_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iteration,chain_i,chain_j,accepted")?;
        for e in &self.exchanges {
            writeln!(
                w,
                "{},{},{},{}",
                e.iteration + 1,
                e.i + 1,
                e.j + 1,
                u8::from(e.accepted)
            )?;
        }
        w.flush()
    }
}

fn write_str<W: Write>(w: &mut W, s: &str) -> io::Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::TraceFormat("truncated trace".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::TraceFormat("invalid utf-8 in header".into()))
    }
}
