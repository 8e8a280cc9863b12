//! Plain-text artifact formats. All writers emit LF line endings and sorted
//! edges so output is byte-for-byte reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::degree::DegreeDistribution;
use crate::epidemics::EpidemicTrace;
use crate::error::{Error, Result};
use crate::estimate::EstimateReport;
use crate::netcore::{Edge, Graph};

fn parse_err(source: &str, line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: source.to_string(),
        msg: format!("line {line}: {msg}"),
    }
}

/// Parses `# key=value key=value` into the values for `keys`, in order.
fn parse_header(source: &str, line: &str, keys: &[&str]) -> Result<Vec<usize>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(source, 1, "missing '#' header"))?;
    let mut out = vec![None; keys.len()];
    for field in body.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| parse_err(source, 1, format!("bad header field '{field}'")))?;
        if let Some(i) = keys.iter().position(|&key| key == k) {
            out[i] = Some(
                v.parse::<usize>()
                    .map_err(|_| parse_err(source, 1, format!("bad value for {k}: '{v}'")))?,
            );
        }
    }
    keys.iter()
        .zip(out)
        .map(|(k, v)| v.ok_or_else(|| parse_err(source, 1, format!("header lacks {k}="))))
        .collect()
}

fn parse_fields<const K: usize>(source: &str, lineno: usize, line: &str) -> Result<[usize; K]> {
    let mut out = [0usize; K];
    let mut parts = line.split('\t');
    for slot in out.iter_mut() {
        let field = parts
            .next()
            .ok_or_else(|| parse_err(source, lineno, format!("expected {K} tab-separated fields")))?;
        *slot = field
            .trim()
            .parse()
            .map_err(|_| parse_err(source, lineno, format!("not a node index: '{field}'")))?;
    }
    if parts.next().is_some() {
        return Err(parse_err(source, lineno, format!("expected {K} tab-separated fields")));
    }
    Ok(out)
}

fn checked_edge(source: &str, lineno: usize, n: usize, u: usize, v: usize) -> Result<Edge> {
    if u >= v {
        return Err(parse_err(source, lineno, format!("edge {u}-{v} must have u < v")));
    }
    if v >= n {
        return Err(parse_err(source, lineno, format!("node {v} out of range for {n} nodes")));
    }
    Ok(Edge::new(u, v).expect("u < v"))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Edge list: header `# nodes=N`, then `u<TAB>v` per edge with `u < v`.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut s = format!("# nodes={}\n", graph.node_count());
    for e in graph.sorted_edges() {
        let _ = writeln!(s, "{}\t{}", e.lo(), e.hi());
    }
    s
}

pub fn parse_edge_list(text: &str, source: &str) -> Result<Graph> {
    let header = text.lines().next().ok_or(Error::EmptyInput("edge list"))?;
    let [n] = parse_header(source, header, &["nodes"])?[..] else {
        unreachable!()
    };
    let mut g = Graph::empty(n);
    for (lineno, line) in data_lines(text) {
        let [u, v] = parse_fields::<2>(source, lineno, line)?;
        if !g.insert(checked_edge(source, lineno, n, u, v)?) {
            return Err(parse_err(source, lineno, format!("duplicate edge {u}-{v}")));
        }
    }
    Ok(g)
}

pub fn save_edge_list(path: impl AsRef<Path>, graph: &Graph) -> Result<()> {
    fs::write(path, write_edge_list(graph))?;
    Ok(())
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_edge_list(&fs::read_to_string(path)?, &path.display().to_string())
}

/// Temporal edge list: header `# nodes=N steps=T`, then `t<TAB>u<TAB>v` for
/// every edge of snapshots `0..=T`, ordered by `t` then edge.
pub fn write_temporal_edge_list(snapshots: &[Graph]) -> Result<String> {
    let first = snapshots.first().ok_or(Error::EmptyInput("snapshots"))?;
    let n = first.node_count();
    let mut s = format!("# nodes={n} steps={}\n", snapshots.len() - 1);
    for (t, g) in snapshots.iter().enumerate() {
        if g.node_count() != n {
            return Err(Error::InvalidGraph(format!("snapshot {t} has {} nodes, expected {n}", g.node_count())));
        }
        for e in g.sorted_edges() {
            let _ = writeln!(s, "{t}\t{}\t{}", e.lo(), e.hi());
        }
    }
    Ok(s)
}

pub fn parse_temporal_edge_list(text: &str, source: &str) -> Result<Vec<Graph>> {
    let header = text.lines().next().ok_or(Error::EmptyInput("temporal edge list"))?;
    let [n, steps] = parse_header(source, header, &["nodes", "steps"])?[..] else {
        unreachable!()
    };
    let mut snapshots = vec![Graph::empty(n); steps + 1];
    let mut last_t = 0;
    for (lineno, line) in data_lines(text) {
        let [t, u, v] = parse_fields::<3>(source, lineno, line)?;
        if t > steps {
            return Err(parse_err(source, lineno, format!("time {t} beyond steps={steps}")));
        }
        if t < last_t {
            return Err(parse_err(source, lineno, "times must be ascending"));
        }
        last_t = t;
        if !snapshots[t].insert(checked_edge(source, lineno, n, u, v)?) {
            return Err(parse_err(source, lineno, format!("duplicate edge {u}-{v} at t={t}")));
        }
    }
    Ok(snapshots)
}

pub fn save_temporal_edge_list(path: impl AsRef<Path>, snapshots: &[Graph]) -> Result<()> {
    fs::write(path, write_temporal_edge_list(snapshots)?)?;
    Ok(())
}

pub fn load_temporal_edge_list(path: impl AsRef<Path>) -> Result<Vec<Graph>> {
    let path = path.as_ref();
    parse_temporal_edge_list(&fs::read_to_string(path)?, &path.display().to_string())
}

/// Degree distribution CSV: header `degree,mass`, one row per degree from 0.
pub fn write_degree_csv(dist: &DegreeDistribution<f64>) -> String {
    let mut s = String::from("degree,mass\n");
    for (k, m) in dist.iter() {
        let _ = writeln!(s, "{k},{m}");
    }
    s
}

/// Reads a degree CSV. Degrees may be sparse and unordered; missing degrees
/// get mass 0.
pub fn parse_degree_csv(text: &str, source: &str) -> Result<DegreeDistribution<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| parse_err(source, 1, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["degree", "mass"] {
        return Err(parse_err(source, 1, "header must be 'degree,mass'"));
    }
    let mut masses: Vec<f64> = Vec::new();
    for (i, rec) in rdr.deserialize::<(usize, f64)>().enumerate() {
        let (k, m) = rec.map_err(|e| parse_err(source, i + 2, e))?;
        if masses.len() <= k {
            masses.resize(k + 1, 0.0);
        }
        masses[k] += m;
    }
    DegreeDistribution::new(masses).map_err(|e| Error::Parse {
        path: source.to_string(),
        msg: e.to_string(),
    })
}

pub fn load_degree_csv(path: impl AsRef<Path>) -> Result<DegreeDistribution<f64>> {
    let path = path.as_ref();
    parse_degree_csv(&fs::read_to_string(path)?, &path.display().to_string())
}

/// Loads a degree distribution from either a degree CSV or an edge list,
/// deciding by the first line.
pub fn load_degree_source(path: impl AsRef<Path>) -> Result<DegreeDistribution<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let source = path.display().to_string();
    if text.starts_with('#') {
        let g = parse_edge_list(&text, &source)?;
        Ok(crate::netcore::degree_distribution(&g))
    } else {
        parse_degree_csv(&text, &source)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub const ESTIMATE_CSV_HEADER: &str = "model,n,t,t0,z1,zbar,v1,vbar,alpha,beta";

/// One CSV row matching [`ESTIMATE_CSV_HEADER`]; absent values are empty.
pub fn estimate_csv_row(r: &EstimateReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.model.tag(),
        r.n,
        r.t,
        r.t0,
        r.z1,
        r.zbar,
        opt(r.v1),
        opt(r.vbar),
        opt(r.derived.map(|d| d.alpha)),
        opt(r.derived.map(|d| d.beta)),
    )
}

/// `key=value` lines for terminal output.
pub fn estimate_key_values(r: &EstimateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model={}", r.model.tag());
    let _ = writeln!(s, "n={}\nt={}\nt0={}\nwindows={}", r.n, r.t, r.t0, r.m_windows);
    let _ = writeln!(s, "z1={}\nzbar={}", r.z1, r.zbar);
    if let Some(v) = r.v1 {
        let _ = writeln!(s, "v1={v}");
    }
    if let Some(v) = r.vbar {
        let _ = writeln!(s, "vbar={v}");
    }
    if let Some(d) = r.derived {
        let _ = writeln!(s, "alpha={}\nbeta={}", d.alpha, d.beta);
    }
    s
}

/// Compartment counts: header `step,S,I,R`.
pub fn write_counts_csv(trace: &EpidemicTrace) -> String {
    let mut s = String::from("step,S,I,R\n");
    for c in &trace.counts {
        let _ = writeln!(s, "{},{},{},{}", c.step, c.susceptible, c.infectious, c.recovered);
    }
    s
}

/// Per-node infection history: header `node,infected_at,recovered_at,infector,generation,secondary`.
/// Never-infected nodes are omitted.
pub fn write_nodes_csv(trace: &EpidemicTrace) -> String {
    let mut s = String::from("node,infected_at,recovered_at,infector,generation,secondary\n");
    for (i, r) in trace.nodes.iter().enumerate() {
        let Some(t) = r.infected_at else { continue };
        let _ = writeln!(
            s,
            "{i},{t},{},{},{},{}",
            r.recovered_at.map(|x| x.to_string()).unwrap_or_default(),
            r.infector.map(|x| x.to_string()).unwrap_or_default(),
            r.generation.map(|x| x.to_string()).unwrap_or_default(),
            r.secondary
        );
    }
    s
}

/// Dense index to external id: header `index,user_id`.
pub fn write_node_map_csv(node_ids: &[i64]) -> String {
    let mut s = String::from("index,user_id\n");
    for (i, id) in node_ids.iter().enumerate() {
        let _ = writeln!(s, "{i},{id}");
    }
    s
}
