//! Processor-system text format.
//!
//! ```text
//! proc a states=idle,wait,done start=idle halt=done
//! on idle recv none -> wait send b:ping
//! on wait recv pong -> done
//! proc b states=s start=s
//! on s recv ping -> s send a:pong
//! edge a b
//! edge b a
//! input a 0101
//! ```
//!
//! `on` lines belong to the most recent `proc`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::text::{lines, ParseError};

use super::{NetworkGraph, ProcessorSpec, ProcessorSystem, SimError, Transition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcsysParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

struct RawRule {
    line: usize,
    proc: usize,
    from: String,
    recv: Option<String>,
    to: String,
    sends: Vec<(String, String)>,
}

fn key<'a>(line: usize, tok: &'a str, k: &str) -> Result<&'a str, ParseError> {
    tok.strip_prefix(k)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| ParseError::new(line, format!("expected {k}=..., found `{tok}`")))
}

fn list(s: &str) -> Vec<String> {
    s.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect()
}

pub fn parse_procsys(src: &str) -> Result<ProcessorSystem, ProcsysParseError> {
    let mut procs: Vec<ProcessorSpec> = Vec::new();
    let mut rules: Vec<RawRule> = Vec::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    let mut inputs: Vec<(usize, String, String)> = Vec::new();
    for (line, toks) in lines(src) {
        match toks[0] {
            "proc" => {
                if toks.len() < 4 {
                    return Err(ParseError::new(line, "expected `proc <id> states=<list> start=<s>`").into());
                }
                let states = list(key(line, toks[2], "states")?);
                let start = key(line, toks[3], "start")?;
                let halts = match toks.get(4) {
                    Some(t) => list(key(line, t, "halt")?),
                    None => Vec::new(),
                };
                let idx = |s: &str| {
                    states
                        .iter()
                        .position(|x| x == s)
                        .ok_or_else(|| ParseError::new(line, format!("undeclared state `{s}`")))
                };
                let start = idx(start)?;
                let halting = halts.iter().map(|h| idx(h)).collect::<Result<BTreeSet<_>, _>>()?;
                procs.push(ProcessorSpec {
                    name: toks[1].to_string(),
                    states,
                    start,
                    halting,
                    table: BTreeMap::new(),
                });
            }
            "on" => {
                let Some(proc) = procs.len().checked_sub(1) else {
                    return Err(ParseError::new(line, "`on` before any `proc`").into());
                };
                let [_, from, "recv", recv, "->", to, ref rest @ ..] = toks[..] else {
                    return Err(ParseError::new(line, "expected `on <s> recv <msg|none> -> <s> [send ...]`").into());
                };
                let sends = match rest {
                    [] => Vec::new(),
                    ["send", spec] => spec
                        .split(',')
                        .filter(|x| !x.is_empty())
                        .map(|s| {
                            s.split_once(':')
                                .map(|(p, m)| (p.to_string(), m.to_string()))
                                .ok_or_else(|| ParseError::new(line, format!("expected peer:msg, found `{s}`")))
                        })
                        .collect::<Result<_, _>>()?,
                    ["send"] => Vec::new(),
                    _ => return Err(ParseError::new(line, "trailing tokens after transition").into()),
                };
                rules.push(RawRule {
                    line,
                    proc,
                    from: from.to_string(),
                    recv: (recv != "none").then(|| recv.to_string()),
                    to: to.to_string(),
                    sends,
                });
            }
            "edge" => {
                let [_, a, b] = toks[..] else {
                    return Err(ParseError::new(line, "expected `edge <i> <j>`").into());
                };
                edges.push((line, a.to_string(), b.to_string()));
            }
            "input" => {
                if toks.len() < 2 {
                    return Err(ParseError::new(line, "expected `input <id> <string>`").into());
                }
                inputs.push((line, toks[1].to_string(), toks[2..].join(" ")));
            }
            other => return Err(ParseError::new(line, format!("unknown directive `{other}`")).into()),
        }
    }
    let names: Vec<String> = procs.iter().map(|p| p.name.clone()).collect();
    let find = |line: usize, name: &str| {
        names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| ParseError::new(line, format!("unknown processor `{name}`")))
    };
    let mut edge_set = Vec::new();
    for (line, a, b) in &edges {
        edge_set.push((find(*line, a)?, find(*line, b)?));
    }
    let mut messages: Vec<String> = Vec::new();
    let mut msg = |m: &str| match messages.iter().position(|x| x == m) {
        Some(i) => i,
        None => {
            messages.push(m.to_string());
            messages.len() - 1
        }
    };
    let mut resolved = Vec::new();
    for r in &rules {
        let p = &procs[r.proc];
        let st = |s: &str| {
            p.state_index(s)
                .ok_or_else(|| ParseError::new(r.line, format!("undeclared state `{s}` in `{}`", p.name)))
        };
        let from = st(&r.from)?;
        let next = st(&r.to)?;
        let recv = r.recv.as_deref().map(&mut msg);
        let mut sends = Vec::new();
        for (peer, m) in &r.sends {
            sends.push((find(r.line, peer)?, msg(m)));
        }
        resolved.push((r.line, r.proc, from, recv, Transition { next, sends }));
    }
    for (line, proc, from, recv, t) in resolved {
        if procs[proc].table.insert((from, recv), t).is_some() {
            return Err(ParseError::new(line, "duplicate transition").into());
        }
    }
    let mut ins = vec![None; procs.len()];
    for (line, id, s) in inputs {
        ins[find(line, &id)?] = Some(s);
    }
    let network = NetworkGraph::new(procs.len(), edge_set)?;
    Ok(ProcessorSystem::new(procs, messages, network, ins)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ping_pong() {
        let src = "proc a states=i,w,d start=i halt=d\non i recv none -> w send b:ping\n\
                   on w recv pong -> d\nproc b states=s start=s\non s recv ping -> s send a:pong\n\
                   edge a b\nedge b a\ninput a 01\n";
        let m = parse_procsys(src).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.messages, vec!["ping", "pong"]);
        assert_eq!(m.inputs[0].as_deref(), Some("01"));
        assert!(m.procs[0].halting.contains(&2));
    }

    #[test]
    fn send_without_edge_is_rejected() {
        let src = "proc a states=i start=i\non i recv none -> i send b:x\nproc b states=s start=s\n";
        assert!(matches!(
            parse_procsys(src),
            Err(ProcsysParseError::Sim(SimError::MissingEdge { .. }))
        ));
    }

    #[test]
    fn bad_line_reports_number() {
        let err = parse_procsys("proc a states=i start=i\non i recv\n").unwrap_err();
        assert!(matches!(err, ProcsysParseError::Parse(ParseError { line: 2, .. })));
    }
}
