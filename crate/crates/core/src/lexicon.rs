//! Weighted word-category lexicons and per-text category scoring.
//!
//! The on-disk format is a plain UTF-8 document:
//!
//! ```text
//! %version demo-1
//! %category Personal Pronouns
//! %category I parent=Personal Pronouns
//! i
//! me
//! idk 1.0
//! %category posemo
//! happ*        # stem: matches any token starting with "happ"
//! ```
//!
//! Entry lines are `<pattern>[*] [weight]`; the weight defaults to 1.0 and a
//! trailing `*` turns the pattern into a stem prefix. `#` starts a comment.
//! Parent categories receive the union of their descendants' entries when the
//! file is loaded.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Name of the derived sentiment column (positive minus negative emotion).
pub const EMO: &str = "emo";
const POSEMO: &str = "posemo";
const NEGEMO: &str = "negemo";

/// The lexicon that ships with the crate.
pub const DEMO_LEXICON: &str = include_str!("../data/demo.lex");

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Exact(String),
    Prefix(String),
}

impl Pattern {
    pub fn matches(&self, token: &str) -> bool {
        match self {
            Pattern::Exact(w) => token == w,
            Pattern::Prefix(stem) => token.starts_with(stem.as_str()),
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Pattern::Exact(w) | Pattern::Prefix(w) => w,
        }
    }

    /// Length in characters, used to rank competing matches.
    pub fn char_len(&self) -> usize {
        self.text().chars().count()
    }

    pub fn is_prefix(&self) -> bool {
        matches!(self, Pattern::Prefix(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub pattern: Pattern,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexCategory {
    pub name: String,
    pub parent: Option<String>,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    category: usize,
    len: usize,
    weight: f64,
}

/// An immutable, validated lexicon with a lookup index.
#[derive(Debug, Clone)]
pub struct Lexicon {
    version: String,
    categories: Vec<LexCategory>,
    columns: Arc<[String]>,
    emo_operands: Option<(usize, usize)>,
    exact: HashMap<String, Vec<Hit>>,
    prefix: HashMap<String, Vec<Hit>>,
    max_prefix_chars: usize,
}

/// Percentage-scale category scores for one text.
///
/// Columns follow the lexicon's declaration order, with `emo` appended last
/// when the lexicon defines both `posemo` and `negemo`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScores {
    columns: Arc<[String]>,
    values: Vec<f64>,
    pub token_count: usize,
}

impl CategoryScores {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))
            .map(|i| self.values[i])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.columns
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }
}

impl Lexicon {
    pub fn demo() -> Self {
        parse_lexicon(DEMO_LEXICON).expect("bundled demo lexicon is valid")
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn categories(&self) -> &[LexCategory] {
        &self.categories
    }

    pub fn category(&self, name: &str) -> Option<&LexCategory> {
        self.categories
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }

    /// Score column names: every category, then `emo` if derivable.
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// Case-insensitive column lookup (includes `emo`).
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))
    }

    /// Resolve a list of column names, failing on the first unknown one.
    pub fn resolve_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.column_index(n.as_ref())
                    .ok_or_else(|| Error::UnknownCategory(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Names of categories without a parent-child relation downwards.
    pub fn leaf_categories(&self) -> Vec<&str> {
        self.categories
            .iter()
            .filter(|c| {
                !self.categories.iter().any(|o| {
                    o.parent
                        .as_deref()
                        .is_some_and(|p| p.eq_ignore_ascii_case(&c.name))
                })
            })
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn score(&self, text: &str) -> CategoryScores {
        self.score_tokens(&tokenize(text))
    }

    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> CategoryScores {
        let n_cat = self.categories.len();
        let mut values = vec![0.0; self.columns.len()];
        if !tokens.is_empty() {
            let mut best: Vec<Option<(usize, f64)>> = vec![None; n_cat];
            let mut sums = vec![0.0; n_cat];
            for token in tokens {
                let token = token.as_ref();
                best.iter_mut().for_each(|b| *b = None);
                self.collect_best(token, &mut best);
                for (sum, b) in sums.iter_mut().zip(&best) {
                    if let Some((_, w)) = b {
                        *sum += w;
                    }
                }
            }
            let n = tokens.len() as f64;
            for (v, s) in values.iter_mut().zip(&sums) {
                *v = 100.0 * s / n;
            }
            if let Some((pos, neg)) = self.emo_operands {
                values[n_cat] = values[pos] - values[neg];
            }
        }
        CategoryScores {
            columns: Arc::clone(&self.columns),
            values,
            token_count: tokens.len(),
        }
    }

    /// Best match per category for one token: longest pattern, then highest weight.
    fn collect_best(&self, token: &str, best: &mut [Option<(usize, f64)>]) {
        let mut offer = |hits: &[Hit]| {
            for h in hits {
                let slot = &mut best[h.category];
                let better = match *slot {
                    None => true,
                    Some((len, w)) => h.len > len || (h.len == len && h.weight > w),
                };
                if better {
                    *slot = Some((h.len, h.weight));
                }
            }
        };
        if let Some(hits) = self.exact.get(token) {
            offer(hits);
        }
        for (n_chars, (idx, ch)) in token.char_indices().enumerate() {
            if n_chars >= self.max_prefix_chars {
                break;
            }
            let end = idx + ch.len_utf8();
            if let Some(hits) = self.prefix.get(&token[..end]) {
                offer(hits);
            }
        }
    }

    fn build(version: String, categories: Vec<LexCategory>) -> Self {
        let mut exact: HashMap<String, Vec<Hit>> = HashMap::new();
        let mut prefix: HashMap<String, Vec<Hit>> = HashMap::new();
        let mut max_prefix_chars = 0;
        for (ci, cat) in categories.iter().enumerate() {
            for e in &cat.entries {
                let hit = Hit {
                    category: ci,
                    len: e.pattern.char_len(),
                    weight: e.weight,
                };
                match &e.pattern {
                    Pattern::Exact(w) => exact.entry(w.clone()).or_default().push(hit),
                    Pattern::Prefix(s) => {
                        max_prefix_chars = max_prefix_chars.max(hit.len);
                        prefix.entry(s.clone()).or_default().push(hit)
                    }
                }
            }
        }
        let find = |n: &str| {
            categories
                .iter()
                .position(|c| c.name.eq_ignore_ascii_case(n))
        };
        let emo_operands = find(POSEMO).zip(find(NEGEMO));
        let mut columns: Vec<String> = categories.iter().map(|c| c.name.clone()).collect();
        if emo_operands.is_some() {
            columns.push(EMO.to_string());
        }
        Lexicon {
            version,
            categories,
            columns: columns.into(),
            emo_operands,
            exact,
            prefix,
            max_prefix_chars,
        }
    }
}

/// Parse the lexicon text format.
pub fn parse_lexicon(source: &str) -> Result<Lexicon> {
    let mut version = String::from("unversioned");
    let mut categories: Vec<LexCategory> = Vec::new();
    let mut header_lines: Vec<usize> = Vec::new();

    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| Error::LexiconSyntax {
            line: line_no,
            message: message.to_string(),
        };

        if let Some(directive) = line.strip_prefix('%') {
            if let Some(rest) = directive.strip_prefix("category") {
                if !rest.starts_with(char::is_whitespace) {
                    return Err(syntax("expected `%category <name> [parent=<name>]`"));
                }
                let (name, parent) = match rest.find("parent=") {
                    Some(pos) => (rest[..pos].trim(), Some(rest[pos + 7..].trim())),
                    None => (rest.trim(), None),
                };
                if name.is_empty() {
                    return Err(syntax("category name is empty"));
                }
                if parent.is_some_and(str::is_empty) {
                    return Err(syntax("parent name is empty"));
                }
                if name.eq_ignore_ascii_case(EMO) {
                    return Err(syntax("`emo` is reserved for the derived sentiment score"));
                }
                if categories.iter().any(|c| c.name.eq_ignore_ascii_case(name)) {
                    return Err(Error::DuplicateCategory {
                        line: line_no,
                        name: name.to_string(),
                    });
                }
                categories.push(LexCategory {
                    name: name.to_string(),
                    parent: parent.map(str::to_string),
                    entries: Vec::new(),
                });
                header_lines.push(line_no);
            } else if let Some(rest) = directive.strip_prefix("version") {
                version = rest.trim().to_string();
            } else {
                return Err(syntax("unknown directive"));
            }
            continue;
        }

        let Some(current) = categories.last_mut() else {
            return Err(syntax("entry before any `%category` header"));
        };
        let mut fields = line.split_whitespace();
        let pat = fields.next().unwrap_or_default().to_lowercase();
        let weight = match fields.next() {
            None => 1.0,
            Some(w) => w
                .parse::<f64>()
                .map_err(|_| syntax(&format!("invalid weight `{w}`")))?,
        };
        if fields.next().is_some() {
            return Err(syntax("expected `<pattern>[*] [weight]`"));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(syntax(&format!("weight must be positive, got {weight}")));
        }
        let pattern = match pat.strip_suffix('*') {
            Some(stem) => Pattern::Prefix(stem.to_string()),
            None => Pattern::Exact(pat.clone()),
        };
        if pattern.text().is_empty() {
            return Err(syntax("empty pattern"));
        }
        current.entries.push(Entry { pattern, weight });
    }

    if categories.is_empty() {
        return Err(Error::EmptyLexicon);
    }
    materialize_parents(&mut categories, &header_lines)?;
    Ok(Lexicon::build(version, categories))
}

/// Copy every descendant's entries into its ancestors, keeping the highest
/// weight when the same pattern arrives twice.
fn materialize_parents(categories: &mut [LexCategory], header_lines: &[usize]) -> Result<()> {
    let n = categories.len();
    let mut parent_of = vec![None; n];
    for (i, cat) in categories.iter().enumerate() {
        if let Some(p) = &cat.parent {
            let idx = categories
                .iter()
                .position(|c| c.name.eq_ignore_ascii_case(p))
                .ok_or_else(|| Error::LexiconSyntax {
                    line: header_lines[i],
                    message: format!("unknown parent category `{p}`"),
                })?;
            parent_of[i] = Some(idx);
        }
    }
    let own: Vec<Vec<Entry>> = categories.iter().map(|c| c.entries.clone()).collect();
    for (i, entries) in own.into_iter().enumerate() {
        let mut seen = 0;
        let mut cur = parent_of[i];
        while let Some(p) = cur {
            seen += 1;
            if seen > n || p == i {
                return Err(Error::LexiconSyntax {
                    line: header_lines[i],
                    message: format!("parent cycle through `{}`", categories[i].name),
                });
            }
            for e in &entries {
                let target = &mut categories[p].entries;
                match target.iter_mut().find(|x| x.pattern == e.pattern) {
                    Some(x) => x.weight = x.weight.max(e.weight),
                    None => target.push(e.clone()),
                }
            }
            cur = parent_of[p];
        }
    }
    Ok(())
}

/// Split a message into lowercase lexicon tokens.
///
/// URLs and `@handles` are dropped, a leading `#` is stripped, internal
/// apostrophes are kept and every other non-alphanumeric character separates
/// tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let lower = chunk.to_lowercase();
        if lower.starts_with("http://")
            || lower.starts_with("https://")
            || lower.starts_with("www.")
        {
            continue;
        }
        if lower.starts_with('@') {
            continue;
        }
        let body = lower.trim_start_matches('#');
        for piece in body.split(|c: char| !(c.is_alphanumeric() || is_apostrophe(c))) {
            let word = piece.trim_matches(is_apostrophe);
            if !word.is_empty() {
                out.push(word.replace('\u{2019}', "'"));
            }
        }
    }
    out
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(toks("I LOVE this http://t.co/x"), ["i", "love", "this"]);
        assert_eq!(toks("@ukip #AskThicke idk"), ["askthicke", "idk"]);
        assert!(toks("").is_empty());
        assert!(toks("!!!").is_empty());
        assert_eq!(
            toks("don't stop, 'quoted' word"),
            ["don't", "stop", "quoted", "word"]
        );
        assert_eq!(toks("it\u{2019}s fine"), ["it's", "fine"]);
        assert_eq!(toks("a-b/c"), ["a", "b", "c"]);
    }

    #[test]
    fn parse_i_category() {
        let lex = parse_lexicon("%category I\ni\nme\nmine\nmy\nidk\n").unwrap();
        assert_eq!(lex.category("i").unwrap().entries.len(), 5);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_lexicon(""), Err(Error::EmptyLexicon)));
        assert!(matches!(
            parse_lexicon("# only comments\n"),
            Err(Error::EmptyLexicon)
        ));
        assert!(matches!(
            parse_lexicon("%category a\nx\n%category A\n"),
            Err(Error::DuplicateCategory { line: 3, .. })
        ));
        assert!(matches!(
            parse_lexicon("%category a\nx 0\n"),
            Err(Error::LexiconSyntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_lexicon("%category a\nx -1\n"),
            Err(Error::LexiconSyntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_lexicon("%category a\n*\n"),
            Err(Error::LexiconSyntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_lexicon("x\n"),
            Err(Error::LexiconSyntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_lexicon("%category a\nx y z\n"),
            Err(Error::LexiconSyntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_lexicon("%category a parent=b\nx\n"),
            Err(Error::LexiconSyntax { line: 1, .. })
        ));
        assert!(parse_lexicon("%category emo\nx\n").is_err());
        assert!(parse_lexicon("%categoryfoo\n").is_err());
    }

    #[test]
    fn parent_cycles_are_rejected() {
        let src = "%category a parent=b\nx\n%category b parent=a\ny\n";
        assert!(parse_lexicon(src).is_err());
    }

    #[test]
    fn stem_prefix_matches() {
        let lex = parse_lexicon("%category posemo\nhapp*\n").unwrap();
        for w in ["happy", "happiness", "happ"] {
            assert_eq!(lex.score(w).get("posemo"), Some(100.0), "{w}");
        }
        assert_eq!(lex.score("hap").get("posemo"), Some(0.0));
        let p = &lex.category("posemo").unwrap().entries[0].pattern;
        assert!(p.matches("happy") && p.matches("happiness") && !p.matches("unhappy"));
    }

    #[test]
    fn parents_receive_union() {
        let src = "%category pp\n%category I parent=pp\ni\nme\n%category we parent=pp\nwe\nme 2\n";
        let lex = parse_lexicon(src).unwrap();
        let pp = lex.category("pp").unwrap();
        assert_eq!(pp.entries.len(), 3);
        let me = pp
            .entries
            .iter()
            .find(|e| e.pattern.text() == "me")
            .unwrap();
        assert_eq!(me.weight, 2.0);
    }

    #[test]
    fn best_match_within_category() {
        // "happy" hits both the exact word and the stem; only the longer counts.
        let lex = parse_lexicon("%category posemo\nhapp* 3\nhappy 1\n").unwrap();
        assert_eq!(lex.score("happy").get("posemo"), Some(100.0));
        assert_eq!(lex.score("happier").get("posemo"), Some(300.0));
        // equal length: higher weight wins
        let lex = parse_lexicon("%category c\nab* 2\nab 1\n").unwrap();
        assert_eq!(lex.score("ab").get("c"), Some(200.0));
    }

    #[test]
    fn demo_lexicon_examples() {
        let lex = Lexicon::demo();
        let s = lex.score("idk");
        for c in ["I", "Personal Pronouns", "Netspeak", "Filler"] {
            assert_eq!(s.get(c), Some(100.0), "{c}");
        }
        let s = lex.score("love nice sweet");
        assert_eq!(s.get("posemo"), Some(100.0));
        assert_eq!(s.get("emo"), Some(100.0));
        let s = lex.score("!!!");
        assert_eq!(s.token_count, 0);
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn emo_is_posemo_minus_negemo() {
        let lex = Lexicon::demo();
        let s = lex.score("I love it but hate the awful rain");
        let emo = s.get("emo").unwrap();
        assert!((emo - (s.get("posemo").unwrap() - s.get("negemo").unwrap())).abs() < 1e-12);
        assert!(emo < 0.0);
    }

    #[test]
    fn no_emo_without_operands() {
        let lex = parse_lexicon("%category posemo\nlove\n").unwrap();
        assert_eq!(lex.columns().len(), 1);
        assert_eq!(lex.score("love").get("emo"), None);
    }
}
