//! LETOR / SVMLight ranking data: parsing, the canonical writer, per-query
//! normalization, fold layouts and a seeded synthetic generator.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A single query-document pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Document<T> {
    pub doc_id: String,
    pub relevance: u32,
    pub features: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryGroup<T> {
    pub query_id: String,
    pub documents: Vec<Document<T>>,
}

impl<T: Scalar> QueryGroup<T> {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn relevances(&self) -> Vec<u32> {
        self.documents.iter().map(|d| d.relevance).collect()
    }
}

/// Query ids assigned to each partition of one fold.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

/// Fractions used to split a single-file dataset into one fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatio {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatio {
    /// The 3:1:1 layout of the public LETOR folds.
    fn default() -> Self {
        SplitRatio {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        }
    }
}

impl SplitRatio {
    fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "split fractions must be non-negative, got {self:?}"
            )));
        }
        let total: f64 = parts.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "split fractions must sum to 1, got {total}"
            )));
        }
        Ok(())
    }
}

/// An immutable collection of query groups with fold splits.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    dimensionality: usize,
    queries: Vec<QueryGroup<T>>,
    index: HashMap<String, usize>,
    folds: Vec<Fold>,
    max_grade: u32,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset and checks every invariant. With `max_grade` unset the
    /// largest observed label is used.
    pub fn new(queries: Vec<QueryGroup<T>>, folds: Vec<Fold>, max_grade: Option<u32>) -> Result<Self> {
        let dimensionality = queries
            .iter()
            .flat_map(|q| q.documents.first())
            .map(|d| d.features.len())
            .next()
            .unwrap_or(0);
        if dimensionality == 0 {
            return Err(Error::Validation("dataset has no features".into()));
        }
        let mut index = HashMap::with_capacity(queries.len());
        let mut observed_grade = 0;
        for (i, q) in queries.iter().enumerate() {
            if q.documents.is_empty() {
                return Err(Error::Validation(format!("query {} has no documents", q.query_id)));
            }
            if index.insert(q.query_id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate query id {}", q.query_id)));
            }
            for d in &q.documents {
                if d.features.len() != dimensionality {
                    return Err(Error::DimensionMismatch {
                        expected: dimensionality,
                        actual: d.features.len(),
                    });
                }
                observed_grade = observed_grade.max(d.relevance);
            }
        }
        let max_grade = match max_grade {
            Some(g) if g < observed_grade => {
                return Err(Error::Validation(format!(
                    "relevance {observed_grade} exceeds declared max grade {g}"
                )))
            }
            Some(g) => g,
            None => observed_grade,
        };
        for (k, fold) in folds.iter().enumerate() {
            let mut seen = HashMap::new();
            for (part, ids) in [
                ("train", &fold.train),
                ("validation", &fold.validation),
                ("test", &fold.test),
            ] {
                for id in ids {
                    if !index.contains_key(id) {
                        return Err(Error::Validation(format!(
                            "fold {} {part} references unknown query {id}",
                            k + 1
                        )));
                    }
                    if let Some(other) = seen.insert(id.clone(), part) {
                        return Err(Error::Validation(format!(
                            "fold {}: query {id} is in both {other} and {part}",
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(Dataset {
            dimensionality,
            queries,
            index,
            folds,
            max_grade,
        })
    }

    pub fn dimensionality(&self) -> usize {
        self.dimensionality
    }

    pub fn max_grade(&self) -> u32 {
        self.max_grade
    }

    pub fn queries(&self) -> &[QueryGroup<T>] {
        &self.queries
    }

    pub fn folds(&self) -> &[Fold] {
        &self.folds
    }

    pub fn query(&self, id: &str) -> Option<&QueryGroup<T>> {
        self.index.get(id).map(|&i| &self.queries[i])
    }

    /// Resolves a list of query ids from a fold.
    pub fn select<'a>(&'a self, ids: &'a [String]) -> impl Iterator<Item = &'a QueryGroup<T>> + 'a {
        ids.iter().filter_map(move |id| self.query(id))
    }

    /// Replaces the folds with one fold that splits the queries, in order of
    /// first appearance, by `ratio`.
    pub fn with_single_split(mut self, ratio: SplitRatio) -> Result<Self> {
        ratio.validate()?;
        let n = self.queries.len();
        let n_train = ((ratio.train * n as f64).round() as usize).min(n);
        let n_vali = ((ratio.validation * n as f64).round() as usize).min(n - n_train);
        let ids: Vec<String> = self.queries.iter().map(|q| q.query_id.clone()).collect();
        self.folds = vec![Fold {
            train: ids[..n_train].to_vec(),
            validation: ids[n_train..n_train + n_vali].to_vec(),
            test: ids[n_train + n_vali..].to_vec(),
        }];
        Ok(self)
    }

    pub fn fold(&self, k: usize) -> Option<&Fold> {
        self.folds.get(k)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

struct ParsedLine<T> {
    label: u32,
    qid: String,
    doc_id: Option<String>,
    pairs: Vec<(usize, T)>,
}

fn parse_line<T: Scalar>(raw: &str, line: usize) -> Result<Option<ParsedLine<T>>> {
    let (body, comment) = match raw.find('#') {
        Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
        None => (raw, None),
    };
    let mut tokens = body.split_whitespace();
    let Some(label) = tokens.next() else {
        return Ok(None);
    };
    let label: u32 = label
        .parse()
        .map_err(|_| parse_err(line, format!("invalid relevance label {label:?}")))?;
    let qid = tokens
        .next()
        .and_then(|t| t.strip_prefix("qid:"))
        .filter(|q| !q.is_empty())
        .ok_or_else(|| parse_err(line, "missing qid"))?
        .to_string();
    let mut pairs = Vec::new();
    let mut last = 0;
    for token in tokens {
        let (fid, value) = token
            .split_once(':')
            .ok_or_else(|| parse_err(line, format!("malformed feature pair {token:?}")))?;
        let fid: usize = fid
            .parse()
            .map_err(|_| parse_err(line, format!("invalid feature id {fid:?}")))?;
        if fid == 0 {
            return Err(parse_err(line, "feature ids start at 1"));
        }
        if fid <= last {
            return Err(parse_err(line, format!("feature id {fid} is not increasing")));
        }
        let value: T = value
            .parse()
            .map_err(|_| parse_err(line, format!("invalid feature value {value:?}")))?;
        pairs.push((fid, value));
        last = fid;
    }
    let doc_id = comment.and_then(|c| {
        let c = c.trim();
        let rest = c.strip_prefix("docid")?.trim_start();
        let rest = rest.strip_prefix('=').unwrap_or(rest);
        rest.split_whitespace().next().map(str::to_string)
    });
    Ok(Some(ParsedLine {
        label,
        qid,
        doc_id,
        pairs,
    }))
}

/// Parsed queries before dense expansion, in first-appearance order.
struct RawCorpus<T> {
    order: Vec<String>,
    groups: HashMap<String, Vec<ParsedLine<T>>>,
    max_fid: usize,
}

fn read_raw<T: Scalar, R: BufRead>(source: R) -> Result<RawCorpus<T>> {
    let mut corpus = RawCorpus {
        order: Vec::new(),
        groups: HashMap::new(),
        max_fid: 0,
    };
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let Some(parsed) = parse_line::<T>(&line, i + 1)? else {
            continue;
        };
        if let Some(&(fid, _)) = parsed.pairs.last() {
            corpus.max_fid = corpus.max_fid.max(fid);
        }
        corpus
            .groups
            .entry(parsed.qid.clone())
            .or_insert_with(|| {
                corpus.order.push(parsed.qid.clone());
                Vec::new()
            })
            .push(parsed);
    }
    Ok(corpus)
}

fn densify<T: Scalar>(raw: RawCorpus<T>, dimensionality: usize) -> Vec<QueryGroup<T>> {
    let RawCorpus { order, mut groups, .. } = raw;
    order
        .into_iter()
        .map(|qid| {
            let lines = groups.remove(&qid).unwrap_or_default();
            let documents = lines
                .into_iter()
                .enumerate()
                .map(|(i, l)| {
                    let mut features = vec![T::zero(); dimensionality];
                    for (fid, v) in l.pairs {
                        features[fid - 1] = v;
                    }
                    Document {
                        doc_id: l.doc_id.unwrap_or_else(|| format!("{qid}-{i}")),
                        relevance: l.label,
                        features,
                    }
                })
                .collect();
            QueryGroup {
                query_id: qid,
                documents,
            }
        })
        .collect()
}

/// Parses a LETOR stream into a dataset with a single fold holding every
/// query as training data.
pub fn parse_letor<T: Scalar, R: BufRead>(source: R) -> Result<Dataset<T>> {
    parse_letor_with_dimensionality(source, None)
}

/// Like [`parse_letor`], but fails when the observed dimensionality differs
/// from `hint`.
pub fn parse_letor_with_dimensionality<T: Scalar, R: BufRead>(source: R, hint: Option<usize>) -> Result<Dataset<T>> {
    let raw = read_raw::<T, _>(source)?;
    if raw.order.is_empty() {
        return Err(Error::Validation("no documents in input".into()));
    }
    let dim = raw.max_fid;
    if let Some(h) = hint {
        if h != dim {
            return Err(Error::Validation(format!(
                "dimensionality hint {h} disagrees with max feature id {dim}"
            )));
        }
    }
    let queries = densify(raw, dim);
    let fold = Fold {
        train: queries.iter().map(|q| q.query_id.clone()).collect(),
        ..Fold::default()
    };
    Dataset::new(queries, vec![fold], None)
}

/// Writes the canonical dense form: `<label> qid:<qid> 1:<v1> ... D:<vD> # docid = <id>`.
pub fn write_letor<T: Scalar, W: Write>(ds: &Dataset<T>, mut out: W) -> Result<()> {
    let mut line = String::new();
    for q in ds.queries() {
        for d in &q.documents {
            line.clear();
            write!(line, "{} qid:{}", d.relevance, q.query_id).unwrap();
            for (i, v) in d.features.iter().enumerate() {
                write!(line, " {}:{}", i + 1, v).unwrap();
            }
            write!(line, " # docid = {}", d.doc_id).unwrap();
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

/// Min-max scales every feature column to [0, 1] within each query. Constant
/// columns become 0.
pub fn normalize_per_query<T: Scalar>(ds: &Dataset<T>) -> Dataset<T> {
    let dim = ds.dimensionality;
    let queries = ds
        .queries
        .iter()
        .map(|q| {
            let mut lo = vec![T::infinity(); dim];
            let mut hi = vec![T::neg_infinity(); dim];
            for d in &q.documents {
                for (j, &v) in d.features.iter().enumerate() {
                    lo[j] = lo[j].min(v);
                    hi[j] = hi[j].max(v);
                }
            }
            let documents = q
                .documents
                .iter()
                .map(|d| {
                    let features = d
                        .features
                        .iter()
                        .enumerate()
                        .map(|(j, &v)| {
                            let range = hi[j] - lo[j];
                            if range > T::zero() {
                                (v - lo[j]) / range
                            } else {
                                T::zero()
                            }
                        })
                        .collect();
                    Document { features, ..d.clone() }
                })
                .collect();
            QueryGroup {
                query_id: q.query_id.clone(),
                documents,
            }
        })
        .collect();
    Dataset { queries, ..ds.clone() }
}

/// Loads either a `Fold1..FoldK` directory tree (each with `train.txt`,
/// `vali.txt`, `test.txt`) or a single file split by `ratio`.
pub fn load_dataset<T: Scalar>(path: &Path, ratio: SplitRatio) -> Result<Dataset<T>> {
    if path.is_file() {
        let file = File::open(path)?;
        return parse_letor(BufReader::new(file))?.with_single_split(ratio);
    }
    let mut fold_dirs = Vec::new();
    for k in 1.. {
        let dir = path.join(format!("Fold{k}"));
        if !dir.is_dir() {
            break;
        }
        fold_dirs.push(dir);
    }
    if fold_dirs.is_empty() {
        return Err(Error::Validation(format!(
            "{} is neither a file nor a directory with Fold1..FoldK",
            path.display()
        )));
    }

    let mut order: Vec<String> = Vec::new();
    let mut lines: HashMap<String, Vec<ParsedLine<T>>> = HashMap::new();
    let mut max_fid = 0;
    let mut folds = Vec::with_capacity(fold_dirs.len());
    for dir in &fold_dirs {
        let mut fold = Fold::default();
        for (name, part) in [
            ("train.txt", &mut fold.train),
            ("vali.txt", &mut fold.validation),
            ("test.txt", &mut fold.test),
        ] {
            let file_path = dir.join(name);
            let file = File::open(&file_path)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", file_path.display()))))?;
            let raw = read_raw::<T, _>(BufReader::new(file)).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", file_path.display()),
                },
                other => other,
            })?;
            max_fid = max_fid.max(raw.max_fid);
            let mut groups = raw.groups;
            for qid in raw.order {
                // The same query appears in several folds; keep its first copy.
                if let Some(group) = groups.remove(&qid) {
                    if !lines.contains_key(&qid) {
                        order.push(qid.clone());
                        lines.insert(qid.clone(), group);
                    }
                }
                part.push(qid);
            }
        }
        folds.push(fold);
    }
    let queries = densify(
        RawCorpus {
            order,
            groups: lines,
            max_fid,
        },
        max_fid,
    );
    Dataset::new(queries, folds, None)
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub num_queries: usize,
    pub docs_per_query: usize,
    pub dimensionality: usize,
    pub relevant_fraction: f64,
    pub noise_level: f64,
    pub seed: u64,
    #[serde(default = "default_max_grade")]
    pub max_grade: u32,
    #[serde(default)]
    pub split: SplitRatio,
}

fn default_max_grade() -> u32 {
    4
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_queries == 0 {
            return bad("num_queries must be at least 1".into());
        }
        if self.docs_per_query < 2 {
            return bad(format!(
                "docs_per_query must be at least 2, got {}",
                self.docs_per_query
            ));
        }
        if self.dimensionality < 2 {
            return bad(format!(
                "dimensionality must be at least 2, got {}",
                self.dimensionality
            ));
        }
        if !(0.0..=1.0).contains(&self.relevant_fraction) {
            return bad(format!(
                "relevant_fraction must be in [0, 1], got {}",
                self.relevant_fraction
            ));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad(format!("noise_level must be non-negative, got {}", self.noise_level));
        }
        if self.max_grade == 0 {
            return bad("max_grade must be at least 1".into());
        }
        self.split.validate()
    }
}

/// Generates a dataset in which feature 1 is the relevance grade scaled to
/// [0, 1] plus Gaussian noise of standard deviation `noise_level`, and every
/// other feature is uniform noise on [0, 1].
pub fn generate_synthetic<T: Scalar>(spec: &SyntheticSpec) -> Result<Dataset<T>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let max_grade = spec.max_grade as f64;
    let queries = (0..spec.num_queries)
        .map(|qi| {
            let documents = (0..spec.docs_per_query)
                .map(|di| {
                    let relevance = if rng.random_bool(spec.relevant_fraction) {
                        rng.random_range(1..=spec.max_grade)
                    } else {
                        0
                    };
                    let mut features = Vec::with_capacity(spec.dimensionality);
                    let noise: f64 = rng.sample(StandardNormal);
                    features.push(T::of(relevance as f64 / max_grade + spec.noise_level * noise));
                    for _ in 1..spec.dimensionality {
                        features.push(T::of(rng.random::<f64>()));
                    }
                    Document {
                        doc_id: format!("s{qi}-{di}"),
                        relevance,
                        features,
                    }
                })
                .collect();
            QueryGroup {
                query_id: format!("{}", qi + 1),
                documents,
            }
        })
        .collect();
    Dataset::new(queries, Vec::new(), Some(spec.max_grade))?.with_single_split(spec.split)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset<f64>> {
        parse_letor(text.as_bytes())
    }

    #[test]
    fn sparse_features_are_zero_filled() {
        let ds = parse("1 qid:7 1:0.5 3:1.0").unwrap();
        assert_eq!(ds.dimensionality(), 3);
        let q = ds.query("7").unwrap();
        assert_eq!(q.documents.len(), 1);
        assert_eq!(q.documents[0].features, vec![0.5, 0.0, 1.0]);
        assert_eq!(q.documents[0].relevance, 1);
    }

    #[test]
    fn lines_group_by_qid() {
        let ds = parse("0 qid:a 1:0.0\n2 qid:a 2:3.5\n").unwrap();
        assert_eq!(ds.dimensionality(), 2);
        assert_eq!(ds.queries().len(), 1);
        let q = &ds.queries()[0];
        assert_eq!(q.query_id, "a");
        assert_eq!(q.relevances(), vec![0, 2]);
        assert_eq!(q.documents[0].features, vec![0.0, 0.0]);
        assert_eq!(q.documents[1].features, vec![0.0, 3.5]);
        assert_eq!(ds.max_grade(), 2);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let cases = [
            ("1 qid:1 1:0.5\nx qid:1 1:0.5", 2),
            ("1 1:0.5", 1),
            ("1 qid:1 1:0.5\n\n1 qid:1 0:0.5", 3),
            ("1 qid:1 2:0.5 1:0.3", 1),
            ("1 qid:1 1:abc", 1),
            ("1 qid:1 1-0.5", 1),
        ];
        for (text, expected) in cases {
            match parse(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn dimensionality_hint_must_agree() {
        let src = "1 qid:1 1:0.5 4:2";
        assert!(parse_letor_with_dimensionality::<f64, _>(src.as_bytes(), Some(4)).is_ok());
        assert!(matches!(
            parse_letor_with_dimensionality::<f64, _>(src.as_bytes(), Some(5)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn comments_and_doc_ids() {
        let ds = parse("# header\n2 qid:10 1:1 2:2 # docid = GX001 inc = 1\n0 qid:10 1:3 #no id\n").unwrap();
        let q = ds.query("10").unwrap();
        assert_eq!(q.documents[0].doc_id, "GX001");
        assert_eq!(q.documents[1].doc_id, "10-1");
    }

    const FIXTURE: &str = "\
3 qid:1 1:0.1 2:0.2 3:0.3 # docid = d1
0 qid:1 1:0.4 3:0.6
1 qid:2 2:1.5
2 qid:1 1:-1 2:0 3:1e-3
0 qid:3 1:7 2:8 3:9 # docid = d5

4 qid:2 1:0.25 3:0.75
1 qid:3 3:2.5
0 qid:2 1:1 2:1 3:1
2 qid:4 1:0.5
0 qid:4 2:0.5 3:0.5 # trailing comment
";

    // Independent oracle: tokenizes with plain string splitting and builds
    // (qid, label, dense features) in file order.
    fn oracle(text: &str) -> Vec<(String, u32, Vec<f64>)> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let body = line.split('#').next().unwrap();
            let toks: Vec<&str> = body.split(' ').filter(|t| !t.is_empty()).collect();
            if toks.is_empty() {
                continue;
            }
            let mut dense = vec![0.0; 3];
            for t in &toks[2..] {
                let mut kv = t.split(':');
                let k: usize = kv.next().unwrap().parse().unwrap();
                dense[k - 1] = kv.next().unwrap().parse().unwrap();
            }
            rows.push((toks[1][4..].to_string(), toks[0].parse().unwrap(), dense));
        }
        rows
    }

    #[test]
    fn fixture_matches_independent_parse() {
        let ds = parse(FIXTURE).unwrap();
        let expected = oracle(FIXTURE);
        assert_eq!(ds.dimensionality(), 3);
        let qids: Vec<&str> = ds.queries().iter().map(|q| q.query_id.as_str()).collect();
        assert_eq!(qids, ["1", "2", "3", "4"]);
        for q in ds.queries() {
            let rows: Vec<_> = expected.iter().filter(|r| r.0 == q.query_id).collect();
            assert_eq!(rows.len(), q.documents.len());
            for (row, doc) in rows.iter().zip(&q.documents) {
                assert_eq!(row.1, doc.relevance);
                assert_eq!(row.2, doc.features);
            }
        }
        assert_eq!(ds.max_grade(), 4);
        assert_eq!(ds.fold(0).unwrap().train.len(), 4);
    }

    fn dataset_from_columns(cols: &[&[f64]]) -> Dataset<f64> {
        let n = cols[0].len();
        let documents = (0..n)
            .map(|i| Document {
                doc_id: i.to_string(),
                relevance: 0,
                features: cols.iter().map(|c| c[i]).collect(),
            })
            .collect();
        Dataset::new(
            vec![QueryGroup {
                query_id: "q".into(),
                documents,
            }],
            vec![],
            None,
        )
        .unwrap()
    }

    #[test]
    fn min_max_columns() {
        let ds = dataset_from_columns(&[&[2.0, 4.0, 6.0], &[5.0, 5.0, 5.0]]);
        let norm = normalize_per_query(&ds);
        let col = |j: usize| -> Vec<f64> { norm.queries()[0].documents.iter().map(|d| d.features[j]).collect() };
        assert_eq!(col(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(col(1), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn normalization_matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let queries: Vec<QueryGroup<f64>> = (0..3)
            .map(|q| QueryGroup {
                query_id: q.to_string(),
                documents: (0..6)
                    .map(|i| Document {
                        doc_id: i.to_string(),
                        relevance: rng.random_range(0..3),
                        features: (0..4).map(|_| rng.random_range(-5.0..5.0)).collect(),
                    })
                    .collect(),
            })
            .collect();
        let ds = Dataset::new(queries, vec![], None).unwrap();
        let norm = normalize_per_query(&ds);
        for (q, nq) in ds.queries().iter().zip(norm.queries()) {
            for j in 0..4 {
                let column: Vec<f64> = q.documents.iter().map(|d| d.features[j]).collect();
                let mut lo = f64::MAX;
                for &v in &column {
                    if v < lo {
                        lo = v;
                    }
                }
                let mut hi = f64::MIN;
                for &v in &column {
                    if v > hi {
                        hi = v;
                    }
                }
                for (v, d) in column.iter().zip(&nq.documents) {
                    assert!((d.features[j] - (v - lo) / (hi - lo)).abs() < 1e-15);
                }
            }
            assert_eq!(q.relevances(), nq.relevances());
        }
        assert_eq!(normalize_per_query(&norm), norm);
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec {
            num_queries: 5,
            docs_per_query: 8,
            dimensionality: 3,
            relevant_fraction: 0.3,
            noise_level: 0.1,
            seed: 0,
            max_grade: 4,
            split: SplitRatio::default(),
        };
        let a: Dataset<f64> = generate_synthetic(&spec).unwrap();
        let b: Dataset<f64> = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        let fold = a.fold(0).unwrap();
        assert_eq!((fold.train.len(), fold.validation.len(), fold.test.len()), (3, 1, 1));
    }

    #[test]
    fn noiseless_feature_one_is_scaled_grade() {
        let spec = SyntheticSpec {
            num_queries: 4,
            docs_per_query: 10,
            dimensionality: 2,
            relevant_fraction: 0.5,
            noise_level: 0.0,
            seed: 3,
            max_grade: 4,
            split: SplitRatio::default(),
        };
        let ds: Dataset<f64> = generate_synthetic(&spec).unwrap();
        for d in ds.queries().iter().flat_map(|q| &q.documents) {
            assert_eq!(d.features[0], d.relevance as f64 / 4.0);
            assert!((0.0..1.0).contains(&d.features[1]));
        }
    }

    #[test]
    fn synthetic_spec_bounds() {
        let mut spec = SyntheticSpec {
            num_queries: 4,
            docs_per_query: 10,
            dimensionality: 1,
            relevant_fraction: 0.5,
            noise_level: 0.0,
            seed: 3,
            max_grade: 4,
            split: SplitRatio::default(),
        };
        assert!(generate_synthetic::<f64>(&spec).is_err());
        spec.dimensionality = 2;
        spec.docs_per_query = 1;
        assert!(generate_synthetic::<f64>(&spec).is_err());
        spec.docs_per_query = 2;
        spec.relevant_fraction = 1.5;
        assert!(generate_synthetic::<f64>(&spec).is_err());
    }

    #[test]
    fn fold_validation() {
        let ds = dataset_from_columns(&[&[1.0, 2.0]]);
        let queries = ds.queries().to_vec();
        let bad = Fold {
            train: vec!["q".into()],
            test: vec!["q".into()],
            ..Fold::default()
        };
        assert!(Dataset::new(queries.clone(), vec![bad], None).is_err());
        let unknown = Fold {
            train: vec!["zzz".into()],
            ..Fold::default()
        };
        assert!(Dataset::new(queries, vec![unknown], None).is_err());
    }
}
