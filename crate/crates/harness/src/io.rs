//! File formats.
//!
//! * Matrix: `{"k": 2, "bounds": ["-1", "1"], "entries": [["1", "-1"], ["-1", "1"]]}`
//!   with every number a canonical string (`"n/d"` or an integer in exact
//!   mode; a decimal in float mode).
//! * Alphabet: `{"denominator": 4, "numerators": [-4, -3, ..., 4]}`.
//! * Transcript: JSON lines. A header `{"kind": "header", ...}`, one
//!   `{"kind": "round", ...}` per query, then `{"kind": "recommendation", ...}`
//!   if the session was finalized.

use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{bail, Context};
use mql_core::numerics::{Matrix, Scalar, Vector};
use mql_core::recovery::Alphabet;
use mql_core::{GameMatrix, MixedStrategy, Mode, QueryRecord, Transcript};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub k: usize,
    pub bounds: [String; 2],
    pub entries: Vec<Vec<String>>,
}

impl MatrixFile {
    pub fn from_game<S: Scalar>(m: &GameMatrix<S>) -> Self {
        let (lo, hi) = m.bounds();
        MatrixFile {
            k: m.k(),
            bounds: [lo.to_canonical(), hi.to_canonical()],
            entries: m
                .matrix()
                .to_rows()
                .iter()
                .map(|row| row.iter().map(Scalar::to_canonical).collect())
                .collect(),
        }
    }

    pub fn to_game<S: Scalar>(&self) -> anyhow::Result<GameMatrix<S>> {
        if self.entries.len() != self.k || self.entries.iter().any(|r| r.len() != self.k) {
            bail!(
                "matrix file declares k = {} but entries are not {0}x{0}",
                self.k
            );
        }
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|x| S::parse_canonical(x)).collect())
            .collect::<Result<Vec<Vec<S>>, _>>()?;
        let lo = S::parse_canonical(&self.bounds[0])?;
        let hi = S::parse_canonical(&self.bounds[1])?;
        Ok(GameMatrix::with_bounds(Matrix::from_rows(rows)?, lo, hi)?)
    }
}

pub fn read_matrix<S: Scalar>(path: &Path) -> anyhow::Result<GameMatrix<S>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading matrix {}", path.display()))?;
    let file: MatrixFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing matrix {}", path.display()))?;
    file.to_game()
        .with_context(|| format!("in {}", path.display()))
}

pub fn write_matrix<S: Scalar>(path: &Path, m: &GameMatrix<S>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&MatrixFile::from_game(m))?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphabetFile {
    pub denominator: i64,
    pub numerators: Vec<i64>,
}

pub fn read_alphabet(path: &Path) -> anyhow::Result<Alphabet> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading alphabet {}", path.display()))?;
    let file: AlphabetFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing alphabet {}", path.display()))?;
    Ok(Alphabet::new(file.denominator, file.numerators)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranscriptLine {
    Header {
        k: usize,
        mode: String,
        oracle: String,
    },
    Round {
        t: usize,
        p: Vec<String>,
        q: Vec<String>,
        loss_p: Vec<String>,
        loss_q: Vec<String>,
    },
    Recommendation {
        p: Vec<String>,
        q: Vec<String>,
    },
}

pub fn write_transcript<S: Scalar, W: Write>(out: &mut W, t: &Transcript<S>) -> anyhow::Result<()> {
    let mut line = |l: &TranscriptLine| -> anyhow::Result<()> {
        serde_json::to_writer(&mut *out, l)?;
        out.write_all(b"\n")?;
        Ok(())
    };
    line(&TranscriptLine::Header {
        k: t.k,
        mode: S::MODE.as_str().to_string(),
        oracle: t.oracle.to_string(),
    })?;
    for r in &t.rounds {
        line(&TranscriptLine::Round {
            t: r.t,
            p: r.p.weights().to_canonical(),
            q: r.q.weights().to_canonical(),
            loss_p: r.loss_p.to_canonical(),
            loss_q: r.loss_q.to_canonical(),
        })?;
    }
    if let Some((p, q)) = &t.recommendation {
        line(&TranscriptLine::Recommendation {
            p: p.weights().to_canonical(),
            q: q.weights().to_canonical(),
        })?;
    }
    Ok(())
}

/// Parsed transcript; the oracle name is owned since it comes from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTranscript<S> {
    pub oracle: String,
    pub transcript: Transcript<S>,
}

pub fn read_transcript<S: Scalar, R: BufRead>(input: R) -> anyhow::Result<LoadedTranscript<S>> {
    let mut lines = input.lines().enumerate();
    let (k, oracle) = match lines.next() {
        Some((_, l)) => match serde_json::from_str(&l?)? {
            TranscriptLine::Header { k, mode, oracle } => {
                let mode: Mode = mode.parse()?;
                if mode != S::MODE {
                    bail!("transcript is in {mode} mode, expected {}", S::MODE);
                }
                (k, oracle)
            }
            _ => bail!("transcript must start with a header"),
        },
        None => bail!("empty transcript"),
    };
    let mut transcript = Transcript::new(k, "file");
    let strat = |v: &[String]| -> anyhow::Result<MixedStrategy<S>> {
        Ok(MixedStrategy::new(Vector::parse_canonical(v)?)?)
    };
    for (n, l) in lines {
        let l = l?;
        if l.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&l).with_context(|| format!("line {}", n + 1))? {
            TranscriptLine::Round {
                t,
                p,
                q,
                loss_p,
                loss_q,
            } => {
                if t != transcript.rounds.len() + 1 || transcript.recommendation.is_some() {
                    bail!("line {}: round {t} out of order", n + 1);
                }
                transcript.rounds.push(QueryRecord {
                    t,
                    p: strat(&p)?,
                    q: strat(&q)?,
                    loss_p: Vector::parse_canonical(&loss_p)?,
                    loss_q: Vector::parse_canonical(&loss_q)?,
                });
            }
            TranscriptLine::Recommendation { p, q } => {
                transcript.recommendation = Some((strat(&p)?, strat(&q)?));
            }
            TranscriptLine::Header { .. } => bail!("line {}: second header", n + 1),
        }
    }
    Ok(LoadedTranscript { oracle, transcript })
}
