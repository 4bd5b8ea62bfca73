//! CoNLL-style corpus reader and writer.
//!
//! The on-disk format is column-oriented, one token per line:
//!
//! ```text
//! #begin document (<id>); part <nnn>
//! <doc id> <part> <tok idx in sentence> <token> [<ne>] <coref>
//! ...
//!                       (blank line between sentences)
//! #end document
//! ```
//!
//! The coreference column is always last and uses the bracket convention
//! `(k` / `k)` / `(k)` with `|` joining several markers on one token and `-`
//! for none. When a line has six or more columns the second-to-last column is
//! the named-entity layer with the same bracket shapes over string labels;
//! any columns between the token and the NE layer (speaker, genre, ...) are
//! ignored. Each part of a multi-part document becomes its own [`Document`]
//! with id `<id>#<part>`.

use std::collections::BTreeMap;

use crate::decoder::Clustering;
use crate::error::{Error, Result};

pub type MentionId = usize;

/// A gold mention span over a document's tokens, `[start_tok, end_tok)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    /// Dense index in document order: `doc.mentions[m.id].id == m.id`.
    pub id: MentionId,
    pub start_tok: usize,
    pub end_tok: usize,
    /// Space-joined surface string of the span.
    pub text: String,
}

impl Mention {
    pub fn width(&self) -> usize {
        self.end_tok - self.start_tok
    }
}

/// A gold coreference chain: the set of mentions of one entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorefChain {
    pub chain_id: usize,
    pub mention_ids: Vec<MentionId>,
}

/// A named-entity span `[start_tok, end_tok)` with its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeSpan {
    pub start_tok: usize,
    pub end_tok: usize,
    pub label: String,
}

/// One document part: tokens, sentence boundaries, gold mentions and chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub tokens: Vec<String>,
    /// Per-token sentence id; 0-based, non-decreasing, increments by at most 1.
    pub sentence_index: Vec<usize>,
    /// Sorted by `(start_tok, end_tok)`; `mentions[i].id == i`.
    pub mentions: Vec<Mention>,
    pub gold_chains: Vec<CorefChain>,
    /// Empty when the input had no NE column.
    pub ne_spans: Vec<NeSpan>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentence_index.last().map_or(0, |&s| s + 1)
    }

    /// The gold partition as a [`Clustering`] (includes singleton chains).
    pub fn gold_clustering(&self) -> Clustering {
        Clustering::new(self.gold_chains.iter().map(|c| c.mention_ids.clone()).collect())
    }

    /// Chain id of a mention, if it belongs to one.
    pub fn chain_of(&self, mention: MentionId) -> Option<usize> {
        self.gold_chains
            .iter()
            .find(|c| c.mention_ids.contains(&mention))
            .map(|c| c.chain_id)
    }
}

/// An ordered collection of parsed documents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct OpenBracket {
    start_tok: usize,
    line: usize,
}

/// Parse a CoNLL-style file, which may hold several documents and parts.
pub fn parse_conll(text: &str) -> Result<Corpus> {
    let mut documents = Vec::new();
    let mut lines = text.lines().enumerate().peekable();

    while let Some((lineno, line)) = lines.next() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#begin document") {
            let (id, part) = parse_begin_header(rest, lineno + 1)?;
            let doc_id = format!("{id}#{part}");
            let doc = parse_document_body(&doc_id, &mut lines)?;
            documents.push(doc);
        } else {
            return Err(Error::parse(
                "<input>",
                lineno + 1,
                format!("expected '#begin document', got: {trimmed}"),
            ));
        }
    }

    let mut seen = std::collections::HashSet::new();
    for doc in &documents {
        if !seen.insert(doc.doc_id.clone()) {
            return Err(Error::parse(
                doc.doc_id.clone(),
                0,
                "duplicate document id in corpus",
            ));
        }
    }
    Ok(Corpus { documents })
}

fn parse_begin_header(rest: &str, lineno: usize) -> Result<(String, usize)> {
    // rest looks like: ` (<id>); part <nnn>`
    let rest = rest.trim();
    let open = rest.find('(');
    let close = rest.rfind(')');
    let (open, close) = match (open, close) {
        (Some(o), Some(c)) if o < c => (o, c),
        _ => {
            return Err(Error::parse("<input>", lineno, "malformed #begin document header"));
        }
    };
    let id = rest[open + 1..close].to_string();
    let tail = rest[close + 1..].trim().trim_start_matches(';').trim();
    let part = match tail.strip_prefix("part") {
        Some(p) => p.trim().parse::<usize>().map_err(|_| {
            Error::parse("<input>", lineno, format!("invalid part number: {tail}"))
        })?,
        None => 0,
    };
    Ok((id, part))
}

fn parse_document_body<'a, I>(doc_id: &str, lines: &mut std::iter::Peekable<I>) -> Result<Document>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut tokens: Vec<String> = Vec::new();
    let mut sentence_index: Vec<usize> = Vec::new();
    let mut cur_sentence = 0usize;
    let mut sentence_has_tokens = false;
    let mut saw_end = false;

    // Per-chain stacks of open coref brackets, innermost on top.
    let mut coref_open: BTreeMap<usize, Vec<OpenBracket>> = BTreeMap::new();
    let mut spans: Vec<(usize, usize, usize, usize)> = Vec::new(); // (start, end, chain, line)

    // The NE layer does not nest in this format: single open at a time per label.
    let mut ne_open: Vec<(String, usize, usize)> = Vec::new(); // (label, start, line)
    let mut ne_spans: Vec<NeSpan> = Vec::new();
    let mut saw_ne_column = false;

    for (lineno, raw) in lines.by_ref() {
        let line = raw.trim_end();
        let lineno = lineno + 1;
        if line.trim() == "#end document" {
            saw_end = true;
            break;
        }
        if line.trim().is_empty() {
            if sentence_has_tokens {
                cur_sentence += 1;
                sentence_has_tokens = false;
            }
            continue;
        }
        if line.trim_start().starts_with('#') {
            // Comment or stray header inside a document body.
            return Err(Error::parse(
                doc_id,
                lineno,
                format!("unexpected directive inside document: {}", line.trim()),
            ));
        }

        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() < 5 {
            return Err(Error::parse(
                doc_id,
                lineno,
                format!("expected at least 5 columns, got {}", cols.len()),
            ));
        }
        let tok_idx = tokens.len();
        tokens.push(cols[3].to_string());
        sentence_index.push(cur_sentence);
        sentence_has_tokens = true;

        if cols.len() >= 6 {
            saw_ne_column = true;
            parse_ne_cell(
                doc_id,
                lineno,
                cols[cols.len() - 2],
                tok_idx,
                &mut ne_open,
                &mut ne_spans,
            )?;
        }
        parse_coref_cell(
            doc_id,
            lineno,
            cols[cols.len() - 1],
            tok_idx,
            &mut coref_open,
            &mut spans,
        )?;
    }

    if !saw_end {
        return Err(Error::parse(doc_id, 0, "missing '#end document'"));
    }
    if tokens.is_empty() {
        return Err(Error::parse(doc_id, 0, "empty document"));
    }
    for (chain, stack) in &coref_open {
        if let Some(open) = stack.last() {
            return Err(Error::parse(
                doc_id,
                open.line,
                format!("unbalanced brackets: chain {chain} opened but never closed"),
            ));
        }
    }
    if let Some((label, _, line)) = ne_open.last() {
        return Err(Error::parse(
            doc_id,
            *line,
            format!("unbalanced NE bracket for label {label}"),
        ));
    }
    let _ = saw_ne_column;

    build_document(doc_id, tokens, sentence_index, spans, ne_spans)
}

fn parse_coref_cell(
    doc_id: &str,
    lineno: usize,
    cell: &str,
    tok: usize,
    open: &mut BTreeMap<usize, Vec<OpenBracket>>,
    spans: &mut Vec<(usize, usize, usize, usize)>,
) -> Result<()> {
    if cell == "-" || cell == "_" {
        return Ok(());
    }
    for item in cell.split('|') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::parse(doc_id, lineno, "empty coref marker"));
        }
        let opens = item.starts_with('(');
        let closes = item.ends_with(')');
        let digits = item.trim_start_matches('(').trim_end_matches(')');
        let chain: usize = digits.parse().map_err(|_| {
            Error::parse(doc_id, lineno, format!("invalid coref marker: {item}"))
        })?;
        match (opens, closes) {
            (true, true) => spans.push((tok, tok + 1, chain, lineno)),
            (true, false) => open
                .entry(chain)
                .or_default()
                .push(OpenBracket { start_tok: tok, line: lineno }),
            (false, true) => {
                let stack = open.entry(chain).or_default();
                let Some(b) = stack.pop() else {
                    return Err(Error::parse(
                        doc_id,
                        lineno,
                        format!("unbalanced brackets: close for chain {chain} with no open"),
                    ));
                };
                spans.push((b.start_tok, tok + 1, chain, lineno));
            }
            (false, false) => {
                return Err(Error::parse(doc_id, lineno, format!("invalid coref marker: {item}")));
            }
        }
    }
    Ok(())
}

fn parse_ne_cell(
    doc_id: &str,
    lineno: usize,
    cell: &str,
    tok: usize,
    open: &mut Vec<(String, usize, usize)>,
    spans: &mut Vec<NeSpan>,
) -> Result<()> {
    let cell: String = cell.chars().filter(|&c| c != '*').collect();
    if cell.is_empty() || cell == "-" || cell == "_" {
        return Ok(());
    }
    for item in cell.split('|') {
        let opens = item.starts_with('(');
        let closes = item.ends_with(')');
        let label = item.trim_start_matches('(').trim_end_matches(')');
        match (opens, closes) {
            (true, true) => spans.push(NeSpan {
                start_tok: tok,
                end_tok: tok + 1,
                label: label.to_string(),
            }),
            (true, false) => open.push((label.to_string(), tok, lineno)),
            (false, true) => {
                let Some((open_label, start, _)) = open.pop() else {
                    return Err(Error::parse(doc_id, lineno, "NE close with no open"));
                };
                if !label.is_empty() && label != open_label {
                    return Err(Error::parse(
                        doc_id,
                        lineno,
                        format!("NE close label {label} does not match open {open_label}"),
                    ));
                }
                spans.push(NeSpan { start_tok: start, end_tok: tok + 1, label: open_label });
            }
            (false, false) => {
                return Err(Error::parse(doc_id, lineno, format!("invalid NE marker: {item}")));
            }
        }
    }
    Ok(())
}

fn build_document(
    doc_id: &str,
    tokens: Vec<String>,
    sentence_index: Vec<usize>,
    mut spans: Vec<(usize, usize, usize, usize)>,
    mut ne_spans: Vec<NeSpan>,
) -> Result<Document> {
    // Duplicate identical span within one chain is malformed input.
    let mut seen = std::collections::HashSet::new();
    for &(s, e, c, line) in &spans {
        if !seen.insert((s, e, c)) {
            return Err(Error::parse(
                doc_id,
                line,
                format!("duplicate span [{s},{e}) in chain {c}"),
            ));
        }
    }
    spans.sort_by_key(|&(s, e, c, _)| (s, e, c));

    let mentions: Vec<Mention> = spans
        .iter()
        .enumerate()
        .map(|(id, &(s, e, _, _))| Mention {
            id,
            start_tok: s,
            end_tok: e,
            text: tokens[s..e].join(" "),
        })
        .collect();

    let mut chains: BTreeMap<usize, Vec<MentionId>> = BTreeMap::new();
    for (id, &(_, _, chain, _)) in spans.iter().enumerate() {
        chains.entry(chain).or_default().push(id);
    }
    let gold_chains = chains
        .into_iter()
        .map(|(chain_id, mention_ids)| CorefChain { chain_id, mention_ids })
        .collect();

    ne_spans.sort_by_key(|s| (s.start_tok, s.end_tok));

    Ok(Document {
        doc_id: doc_id.to_string(),
        tokens,
        sentence_index,
        mentions,
        gold_chains,
        ne_spans,
    })
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

/// Emit one document in the column format, using `clustering` for the
/// coreference column.
///
/// Clusters may cover a subset of the document's mentions (unclustered
/// mentions get no bracket), but every referenced mention id must exist, no
/// mention may appear in two clusters, and a cluster must not hold two
/// mentions with an identical span (the bracket encoding cannot express
/// that).
pub fn write_conll(doc: &Document, clustering: &Clustering) -> Result<String> {
    let n = doc.mentions.len();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    for (cluster_idx, cluster) in clustering.clusters.iter().enumerate() {
        let mut spans_in_cluster = std::collections::HashSet::new();
        for &m in cluster {
            if m >= n {
                return Err(Error::Eval(format!(
                    "clustering references unknown mention id {m} in {}",
                    doc.doc_id
                )));
            }
            if assigned[m].is_some() {
                return Err(Error::Eval(format!(
                    "mention {m} appears in more than one cluster in {}",
                    doc.doc_id
                )));
            }
            assigned[m] = Some(cluster_idx);
            let span = (doc.mentions[m].start_tok, doc.mentions[m].end_tok);
            if !spans_in_cluster.insert(span) {
                return Err(Error::Eval(format!(
                    "cluster {cluster_idx} holds two mentions with identical span [{}, {}) in {}",
                    span.0, span.1, doc.doc_id
                )));
            }
        }
    }

    let (base_id, part) = split_doc_id(&doc.doc_id);
    let mut out = String::new();
    out.push_str(&format!("#begin document ({base_id}); part {part:03}\n"));

    let has_ne = !doc.ne_spans.is_empty();
    let mut sent_tok = 0usize;
    for t in 0..doc.tokens.len() {
        if t > 0 && doc.sentence_index[t] != doc.sentence_index[t - 1] {
            out.push('\n');
            sent_tok = 0;
        }
        let coref = coref_cell(doc, &assigned, t);
        if has_ne {
            let ne = ne_cell(doc, t);
            out.push_str(&format!(
                "{base_id} {part} {sent_tok} {} {ne} {coref}\n",
                doc.tokens[t]
            ));
        } else {
            out.push_str(&format!(
                "{base_id} {part} {sent_tok} {} {coref}\n",
                doc.tokens[t]
            ));
        }
        sent_tok += 1;
    }
    out.push_str("#end document\n");
    Ok(out)
}

fn split_doc_id(doc_id: &str) -> (&str, usize) {
    if let Some(pos) = doc_id.rfind('#') {
        if let Ok(part) = doc_id[pos + 1..].parse::<usize>() {
            return (&doc_id[..pos], part);
        }
    }
    (doc_id, 0)
}

/// Build the coref cell for token `t`. Closes come before opens so that
/// crossing same-chain spans re-parse to the original span set under the
/// innermost-first bracket matching of [`parse_conll`].
fn coref_cell(doc: &Document, assigned: &[Option<usize>], t: usize) -> String {
    let mut items: Vec<String> = Vec::new();

    let mut closes: Vec<&Mention> = doc
        .mentions
        .iter()
        .filter(|m| assigned[m.id].is_some() && m.end_tok == t + 1 && m.width() > 1)
        .collect();
    closes.sort_by_key(|m| std::cmp::Reverse(m.start_tok));
    for m in closes {
        items.push(format!("{})", assigned[m.id].unwrap()));
    }

    let mut singles: Vec<&Mention> = doc
        .mentions
        .iter()
        .filter(|m| assigned[m.id].is_some() && m.start_tok == t && m.width() == 1)
        .collect();
    singles.sort_by_key(|m| assigned[m.id].unwrap());
    for m in singles {
        items.push(format!("({})", assigned[m.id].unwrap()));
    }

    let mut opens: Vec<&Mention> = doc
        .mentions
        .iter()
        .filter(|m| assigned[m.id].is_some() && m.start_tok == t && m.width() > 1)
        .collect();
    opens.sort_by_key(|m| (std::cmp::Reverse(m.end_tok), assigned[m.id].unwrap()));
    for m in opens {
        items.push(format!("({}", assigned[m.id].unwrap()));
    }

    if items.is_empty() { "-".to_string() } else { items.join("|") }
}

fn ne_cell(doc: &Document, t: usize) -> String {
    let mut items: Vec<String> = Vec::new();
    for s in &doc.ne_spans {
        if s.end_tok == t + 1 && s.end_tok - s.start_tok > 1 {
            items.push(format!("{})", s.label));
        }
    }
    for s in &doc.ne_spans {
        if s.start_tok == t && s.end_tok == t + 1 {
            items.push(format!("({})", s.label));
        }
    }
    for s in &doc.ne_spans {
        if s.start_tok == t && s.end_tok - s.start_tok > 1 {
            items.push(format!("({}", s.label));
        }
    }
    if items.is_empty() { "-".to_string() } else { items.join("|") }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_text(body: &str) -> String {
        format!("#begin document (test); part 000\n{body}\n#end document\n")
    }

    fn line(tok: &str, coref: &str) -> String {
        format!("test 0 0 {tok} {coref}")
    }

    #[test]
    fn minimal_two_token_mention() {
        let text = doc_text(&format!("{}\n{}", line("a", "(0"), line("b", "0)")));
        let corpus = parse_conll(&text).unwrap();
        assert_eq!(corpus.documents.len(), 1);
        let doc = &corpus.documents[0];
        assert_eq!(doc.doc_id, "test#0");
        assert_eq!(doc.tokens, vec!["a", "b"]);
        assert_eq!(doc.mentions.len(), 1);
        assert_eq!((doc.mentions[0].start_tok, doc.mentions[0].end_tok), (0, 2));
        assert_eq!(doc.gold_chains.len(), 1);
        assert_eq!(doc.gold_chains[0].mention_ids, vec![0]);
    }

    #[test]
    fn crossing_brackets_resolve_per_chain() {
        // Token 0 holds `(0)|(1`, token 1 holds `1)`:
        // chain 0 gets [0,1), chain 1 gets [0,2).
        let text = doc_text(&format!("{}\n{}", line("a", "(0)|(1"), line("b", "1)")));
        let doc = &parse_conll(&text).unwrap().documents[0];
        assert_eq!(doc.mentions.len(), 2);
        let spans: Vec<(usize, usize)> =
            doc.mentions.iter().map(|m| (m.start_tok, m.end_tok)).collect();
        assert_eq!(spans, vec![(0, 1), (0, 2)]);
        // Mention [0,1) belongs to chain 0, mention [0,2) to chain 1.
        assert_eq!(doc.gold_chains[0].mention_ids, vec![0]);
        assert_eq!(doc.gold_chains[1].mention_ids, vec![1]);
    }

    #[test]
    fn missing_end_document_is_error() {
        let text = format!("#begin document (test); part 000\n{}", line("a", "-"));
        assert!(matches!(parse_conll(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn unbalanced_open_is_error() {
        let text = doc_text(&line("a", "(3"));
        let err = parse_conll(&text).unwrap_err();
        assert!(err.to_string().contains("chain 3"));
    }

    #[test]
    fn close_without_open_is_error() {
        let text = doc_text(&line("a", "7)"));
        assert!(parse_conll(&text).is_err());
    }

    #[test]
    fn duplicate_span_same_chain_is_error() {
        let text = doc_text(&line("a", "(0)|(0)"));
        let err = parse_conll(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate span"));
    }

    #[test]
    fn duplicate_span_two_chains_gives_two_mentions() {
        let text = doc_text(&line("a", "(0)|(1)"));
        let doc = &parse_conll(&text).unwrap().documents[0];
        assert_eq!(doc.mentions.len(), 2);
        assert_eq!(doc.gold_chains.len(), 2);
    }

    #[test]
    fn empty_document_is_error() {
        let text = "#begin document (test); part 000\n#end document\n";
        let err = parse_conll(text).unwrap_err();
        assert!(err.to_string().contains("empty document"));
    }

    #[test]
    fn sentence_boundaries_from_blank_lines() {
        let text = doc_text(&format!(
            "{}\n{}\n\n{}",
            line("a", "-"),
            line("b", "-"),
            line("c", "-")
        ));
        let doc = &parse_conll(&text).unwrap().documents[0];
        assert_eq!(doc.sentence_index, vec![0, 0, 1]);
        assert_eq!(doc.sentence_count(), 2);
    }

    #[test]
    fn multi_part_documents_split() {
        let text = "#begin document (bc/xyz); part 000\nbc/xyz 0 0 a (0)\n#end document\n\
                    #begin document (bc/xyz); part 001\nbc/xyz 1 0 b (0)\n#end document\n";
        let corpus = parse_conll(text).unwrap();
        let ids: Vec<&str> = corpus.documents.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, vec!["bc/xyz#0", "bc/xyz#1"]);
    }

    #[test]
    fn ne_column_parsed_when_present() {
        let body = "test 0 0 President (PERSON -\ntest 0 1 Lincoln PERSON) (0)";
        let text = doc_text(body);
        let doc = &parse_conll(&text).unwrap().documents[0];
        assert_eq!(doc.ne_spans.len(), 1);
        assert_eq!(doc.ne_spans[0], NeSpan {
            start_tok: 0,
            end_tok: 2,
            label: "PERSON".to_string()
        });
    }

    #[test]
    fn zero_predicted_chains_emit_dashes() {
        let text = doc_text(&format!("{}\n{}", line("a", "(0"), line("b", "0)")));
        let doc = &parse_conll(&text).unwrap().documents[0];
        let out = write_conll(doc, &Clustering::new(vec![])).unwrap();
        for l in out.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
            assert!(l.ends_with(" -"), "line should end in '-': {l}");
        }
    }

    #[test]
    fn nested_mentions_round_trip_brackets() {
        // (0 (1) 0) over three tokens.
        let body = format!("{}\n{}\n{}", line("a", "(0"), line("b", "(1)"), line("c", "0)"));
        let text = doc_text(&body);
        let doc = &parse_conll(&text).unwrap().documents[0];
        let out = write_conll(doc, &doc.gold_clustering()).unwrap();
        let cells: Vec<&str> = out
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| l.split_whitespace().last().unwrap())
            .collect();
        assert_eq!(cells, vec!["(0", "(1)", "0)"]);
    }

    #[test]
    fn round_trip_is_field_exact() {
        let body = format!(
            "{}\n{}\n\n{}\n{}",
            line("President", "(0"),
            line("Lincoln", "0)|(1)"),
            line("he", "(0)"),
            line("spoke", "-")
        );
        let text = doc_text(&body);
        let parsed = parse_conll(&text).unwrap();
        let doc = &parsed.documents[0];
        let rewritten = write_conll(doc, &doc.gold_clustering()).unwrap();
        let reparsed = parse_conll(&rewritten).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn write_rejects_unknown_mention_id() {
        let text = doc_text(&line("a", "(0)"));
        let doc = &parse_conll(&text).unwrap().documents[0];
        let err = write_conll(doc, &Clustering::new(vec![vec![5]])).unwrap_err();
        assert!(err.to_string().contains("unknown mention id"));
    }

    #[test]
    fn crossing_same_chain_spans_round_trip() {
        // Spans [0,3) and [2,5) in one chain: the writer emits the close
        // before the open on token 2, so innermost-first matching recovers
        // both spans.
        let doc = Document {
            doc_id: "x#0".into(),
            tokens: ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect(),
            sentence_index: vec![0; 5],
            mentions: vec![
                Mention { id: 0, start_tok: 0, end_tok: 3, text: "a b c".into() },
                Mention { id: 1, start_tok: 2, end_tok: 5, text: "c d e".into() },
            ],
            gold_chains: vec![CorefChain { chain_id: 0, mention_ids: vec![0, 1] }],
            ne_spans: vec![],
        };
        let out = write_conll(&doc, &doc.gold_clustering()).unwrap();
        let reparsed = parse_conll(&out).unwrap();
        let spans: Vec<(usize, usize)> = reparsed.documents[0]
            .mentions
            .iter()
            .map(|m| (m.start_tok, m.end_tok))
            .collect();
        assert_eq!(spans, vec![(0, 3), (2, 5)]);
        assert_eq!(reparsed.documents[0].gold_chains.len(), 1);
    }
}
