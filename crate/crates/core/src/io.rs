//! Text instance format.
//!
//! ```text
//! # comment
//! mi graphic <m> <C>
//! graph <n>
//! e <u> <v> <w> <c>        (m lines, vertices 1..n, c may be `inf`)
//! target <R>               (optional)
//! dual <n*>                (optional, graphic only)
//! e <u> <v>                (m lines, dual edge j matches primal edge j)
//! ```
//!
//! `mi uniform <m> <C>` is followed by `uniform <k>` and `m` lines `x <w> <c>`;
//! `mi partition <m> <C>` by `partition <L>` and `L` groups of a `b <cap>
//! <size>` line followed by `size` element lines. Elements are numbered
//! 1..m in order of appearance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::instance::RawInstance;
use crate::matroid::{Block, MatroidSpec};

/// Numeric fields are decimals multiplied by `scale` and rounded when set;
/// otherwise they must be integers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    pub scale: Option<f64>,
}

struct Lines<'a> {
    path: &'a Path,
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    opts: ParseOptions,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: &'a Path, opts: ParseOptions) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                let toks: Vec<&str> = l.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Self { path, lines, pos: 0, opts }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.0)
    }

    fn next(&mut self, keyword: &str, arity: usize) -> Result<(usize, Vec<&'a str>)> {
        let Some((line, toks)) = self.lines.get(self.pos).cloned() else {
            return Err(self.err(self.last_line(), format!("unexpected end of file, expected `{keyword}`")));
        };
        if toks[0] != keyword {
            return Err(self.err(line, format!("expected `{keyword}`, found `{}`", toks[0])));
        }
        if toks.len() != arity + 1 {
            return Err(self.err(line, format!("`{keyword}` takes {arity} fields, found {}", toks.len() - 1)));
        }
        self.pos += 1;
        Ok((line, toks[1..].to_vec()))
    }

    fn peek(&self) -> Option<&str> {
        self.lines.get(self.pos).map(|l| l.1[0])
    }

    fn usize(&self, line: usize, tok: &str, what: &str) -> Result<usize> {
        tok.parse()
            .map_err(|_| self.err(line, format!("{what}: `{tok}` is not a non-negative integer")))
    }

    fn int(&self, line: usize, tok: &str, what: &str) -> Result<i64> {
        match self.opts.scale {
            None => tok
                .parse()
                .map_err(|_| self.err(line, format!("{what}: `{tok}` is not an integer"))),
            Some(s) => {
                let x: f64 = tok
                    .parse()
                    .map_err(|_| self.err(line, format!("{what}: `{tok}` is not a number")))?;
                let v = (x * s).round();
                if !v.is_finite() || v.abs() >= i64::MAX as f64 {
                    return Err(self.err(line, format!("{what}: `{tok}` overflows after scaling")));
                }
                Ok(v as i64)
            }
        }
    }

    fn cost(&self, line: usize, tok: &str) -> Result<Option<u64>> {
        if tok == "inf" {
            return Ok(None);
        }
        let v = self.int(line, tok, "cost")?;
        u64::try_from(v)
            .map(Some)
            .map_err(|_| self.err(line, format!("cost `{tok}` is negative")))
    }

    fn vertex(&self, line: usize, tok: &str, n: usize) -> Result<usize> {
        let v = self.usize(line, tok, "vertex")?;
        if v == 0 || v > n {
            return Err(self.err(line, format!("vertex {v} outside 1..{n}")));
        }
        Ok(v - 1)
    }
}

pub fn parse_str(text: &str, path: &Path, opts: ParseOptions) -> Result<RawInstance> {
    let mut ls = Lines::new(text, path, opts);
    let (hl, head) = ls.next("mi", 3)?;
    let variant = head[0];
    let m = ls.usize(hl, head[1], "element count")?;
    let cap = ls.int(hl, head[2], "capacity")?;
    let capacity = u64::try_from(cap).map_err(|_| ls.err(hl, "capacity is negative"))?;
    let mut weights = Vec::with_capacity(m);
    let mut costs = Vec::with_capacity(m);
    let matroid = match variant {
        "graphic" => {
            let (l, f) = ls.next("graph", 1)?;
            let n = ls.usize(l, f[0], "vertex count")?;
            let mut edges = Vec::with_capacity(m);
            for _ in 0..m {
                let (l, f) = ls.next("e", 4)?;
                edges.push((ls.vertex(l, f[0], n)?, ls.vertex(l, f[1], n)?));
                weights.push(ls.int(l, f[2], "weight")?);
                costs.push(ls.cost(l, f[3])?);
            }
            MatroidSpec::Graphic {
                graph: Multigraph::new(n, edges),
            }
        }
        "uniform" => {
            let (l, f) = ls.next("uniform", 1)?;
            let k = ls.usize(l, f[0], "rank")?;
            if k > m {
                return Err(ls.err(l, format!("rank {k} exceeds {m} elements")));
            }
            for _ in 0..m {
                let (l, f) = ls.next("x", 2)?;
                weights.push(ls.int(l, f[0], "weight")?);
                costs.push(ls.cost(l, f[1])?);
            }
            MatroidSpec::Uniform { m, k }
        }
        "partition" => {
            let (l, f) = ls.next("partition", 1)?;
            let count = ls.usize(l, f[0], "block count")?;
            let mut blocks = Vec::with_capacity(count);
            for _ in 0..count {
                let (l, f) = ls.next("b", 2)?;
                let bcap = ls.usize(l, f[0], "block capacity")?;
                let size = ls.usize(l, f[1], "block size")?;
                if bcap > size {
                    return Err(ls.err(l, format!("block capacity {bcap} exceeds its size {size}")));
                }
                let start = weights.len();
                if start + size > m {
                    return Err(ls.err(l, format!("blocks hold more than {m} elements")));
                }
                for _ in 0..size {
                    let (l, f) = ls.next("x", 2)?;
                    weights.push(ls.int(l, f[0], "weight")?);
                    costs.push(ls.cost(l, f[1])?);
                }
                blocks.push(Block {
                    elements: (start..start + size).collect(),
                    cap: bcap,
                });
            }
            if weights.len() != m {
                return Err(ls.err(l, format!("blocks hold {} elements, header says {m}", weights.len())));
            }
            MatroidSpec::Partition { blocks }
        }
        other => return Err(ls.err(hl, format!("unknown matroid variant `{other}`"))),
    };
    let mut raw = RawInstance::new(matroid, weights, costs, capacity);
    if ls.peek() == Some("target") {
        let (l, f) = ls.next("target", 1)?;
        raw.target = Some(ls.int(l, f[0], "target")?);
    }
    if ls.peek() == Some("dual") {
        let (l, f) = ls.next("dual", 1)?;
        if !matches!(raw.matroid, MatroidSpec::Graphic { .. }) {
            return Err(ls.err(l, "a dual graph is only meaningful for graphic instances"));
        }
        let n = ls.usize(l, f[0], "vertex count")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (l, f) = ls.next("e", 2)?;
            edges.push((ls.vertex(l, f[0], n)?, ls.vertex(l, f[1], n)?));
        }
        raw.dual_graph = Some(Multigraph::new(n, edges));
    }
    if let Some((l, toks)) = ls.lines.get(ls.pos) {
        return Err(ls.err(*l, format!("unexpected `{}`", toks[0])));
    }
    raw.check().map_err(|e| match e {
        Error::Disconnected => Error::Disconnected,
        other => ls.err(hl, other.to_string()),
    })?;
    Ok(raw)
}

pub fn parse_file(path: &Path, opts: ParseOptions) -> Result<RawInstance> {
    let text = std::fs::read_to_string(path)?;
    parse_str(&text, path, opts)
}

fn cost_str(c: Option<u64>) -> String {
    c.map_or_else(|| "inf".to_string(), |c| c.to_string())
}

/// Writes `raw` in the text format. Partition elements are written block by
/// block, so indices are preserved only when blocks are contiguous and in
/// order (as produced by the parser).
pub fn serialize(raw: &RawInstance) -> Result<String> {
    let mut out = String::new();
    let m = raw.len();
    match &raw.matroid {
        MatroidSpec::Graphic { graph } => {
            writeln!(out, "mi graphic {m} {}", raw.capacity).unwrap();
            writeln!(out, "graph {}", graph.n).unwrap();
            for (j, &(u, v)) in graph.edges.iter().enumerate() {
                writeln!(out, "e {} {} {} {}", u + 1, v + 1, raw.weights[j], cost_str(raw.costs[j])).unwrap();
            }
        }
        MatroidSpec::Uniform { k, .. } => {
            writeln!(out, "mi uniform {m} {}", raw.capacity).unwrap();
            writeln!(out, "uniform {k}").unwrap();
            for j in 0..m {
                writeln!(out, "x {} {}", raw.weights[j], cost_str(raw.costs[j])).unwrap();
            }
        }
        MatroidSpec::Partition { blocks } => {
            writeln!(out, "mi partition {m} {}", raw.capacity).unwrap();
            writeln!(out, "partition {}", blocks.len()).unwrap();
            for b in blocks {
                writeln!(out, "b {} {}", b.cap, b.elements.len()).unwrap();
                for &j in &b.elements {
                    writeln!(out, "x {} {}", raw.weights[j], cost_str(raw.costs[j])).unwrap();
                }
            }
        }
        MatroidSpec::DirectSum { .. } => {
            return Err(Error::Unsupported("direct sums have no file representation"));
        }
    }
    if let Some(r) = raw.target {
        writeln!(out, "target {r}").unwrap();
    }
    if let Some(d) = &raw.dual_graph {
        writeln!(out, "dual {}", d.n).unwrap();
        for &(u, v) in &d.edges {
            writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
        }
    }
    Ok(out)
}

pub fn write_file(raw: &RawInstance, path: &Path) -> Result<()> {
    std::fs::write(path, serialize(raw)?)?;
    Ok(())
}

fn mem_path() -> PathBuf {
    PathBuf::from("<memory>")
}

/// Parses text that did not come from a file.
pub fn parse(text: &str) -> Result<RawInstance> {
    parse_str(text, &mem_path(), ParseOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "# triangle\nmi graphic 3 1\ngraph 3\ne 1 2 1 1\ne 2 3 2 1\ne 1 3 3 1\n";

    #[test]
    fn triangle_round_trip() {
        let raw = parse(TRIANGLE).unwrap();
        assert_eq!(raw.weights, vec![1, 2, 3]);
        assert_eq!(raw.capacity, 1);
        let text = serialize(&raw).unwrap();
        assert_eq!(parse(&text).unwrap(), raw);
        assert_eq!(text, TRIANGLE.trim_start_matches("# triangle\n"));
    }

    #[test]
    fn zero_cost_element_is_deleted_on_normalize() {
        let raw = parse("mi uniform 3 1\nuniform 1\nx 5 0\nx 1 2\nx 3 1\n").unwrap();
        let inst = raw.normalize().unwrap();
        assert_eq!(inst.free, vec![0]);
        assert_eq!(inst.perm, vec![1, 2]);
    }

    #[test]
    fn negative_weights_and_inf_costs() {
        let raw = parse("mi partition 3 4\npartition 2\nb 1 2\nx -4 inf\nx 7 2 # c\nb 0 1\nx 0 1\ntarget -3\n").unwrap();
        assert_eq!(raw.weights, vec![-4, 7, 0]);
        assert_eq!(raw.costs, vec![None, Some(2), Some(1)]);
        assert_eq!(raw.target, Some(-3));
        assert_eq!(parse(&serialize(&raw).unwrap()).unwrap(), raw);
    }

    #[test]
    fn dual_section() {
        let text = format!("{TRIANGLE}dual 2\ne 1 2\ne 1 2\ne 1 2\n");
        let raw = parse(&text).unwrap();
        assert_eq!(raw.dual_graph.as_ref().unwrap().edges, vec![(0, 1); 3]);
        assert_eq!(parse(&serialize(&raw).unwrap()).unwrap(), raw);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "mi graphic 3 1\ngraph 3\ne 1 2 1 1\n\ne 2 x 2 1\ne 1 3 3 1\n";
        match parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        match parse("mi graphic 2 0\ngraph 2\ne 1 2 1 1\n") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("unexpected end"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("mi cubic 1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("mi uniform 1 0\nuniform 1\nx 1 -1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(
            parse("mi uniform 1 0\nuniform 1\nx 1 1\nextra\n"),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn disconnected_graph_rejected() {
        let text = "mi graphic 1 0\ngraph 3\ne 1 2 1 1\n";
        assert!(matches!(parse(text), Err(Error::Disconnected)));
    }

    #[test]
    fn decimal_scaling() {
        let opts = ParseOptions { scale: Some(1e6) };
        let raw = parse_str("mi uniform 2 0.5\nuniform 1\nx 0.25 1.5\nx 1 inf\n", &mem_path(), opts).unwrap();
        assert_eq!(raw.capacity, 500_000);
        assert_eq!(raw.weights, vec![250_000, 1_000_000]);
        assert_eq!(raw.costs, vec![Some(1_500_000), None]);
        assert!(parse("mi uniform 1 0.5\nuniform 1\nx 1 1\n").is_err());
    }
}
