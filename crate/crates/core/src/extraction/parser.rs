//! Lightweight method extraction for Java and C++.
//!
//! Comments and string literals are masked out, then braces are matched.
//! A block is a method body when it opens directly inside a type or
//! namespace body (or at file level) and the text before it looks like a
//! signature: a name, a balanced parameter list and only qualifiers after
//! it. Everything outside method bodies belongs to the file's dummy method.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use super::entity::{dummy_entity_id, method_entity_id, Granularity, Language, SourceEntity};
use super::lexer::{comment_body, executable_line_starts, scan, SegmentKind};

/// Method boundaries could not be determined; the whole file went to the
/// dummy method.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {reason}; whole file assigned to the dummy method")]
pub struct ParseFallback {
    pub path: String,
    pub reason: String,
}

/// Entities extracted from one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedFile {
    pub entities: Vec<SourceEntity>,
    pub fallback: Option<ParseFallback>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    Container,
    Method,
    Other,
}

struct Frame {
    kind: Block,
    /// Position right after the last `;`, `{` or `}` seen at this level.
    stmt_start: usize,
    /// Index into `methods` when `kind == Method`.
    method: Option<usize>,
}

struct MethodSpan {
    name: String,
    span: Range<usize>,
}

static ACCESS_LABEL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*(?:public|private|protected|signals|slots|Q_SLOTS|Q_SIGNALS)\s*:(?:[^:]|$)")
        .unwrap()
});
static JAVA_THROWS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*throws\s+[\w.$<>?,\s\[\]]+$").unwrap());
static CPP_QUALIFIERS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"^(?:\s*(?:const|noexcept|override|final|volatile|mutable|try|&&|&|throw\s*\([^)]*\)|noexcept\s*\([^)]*\)|->\s*[\w:<>,\s*&]+))*\s*$",
    )
    .unwrap()
});

const JAVA_CONTAINERS: &[&str] = &["class", "interface", "enum", "record"];
const CPP_CONTAINERS: &[&str] = &["class", "struct", "namespace", "union", "extern"];
const NOT_METHODS: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "new",
    "else",
    "do",
    "try",
    "sizeof",
    "assert",
    "throw",
    "foreach",
    "case",
    "defined",
    "decltype",
    "alignas",
];

/// Replaces comments and string literals with spaces, keeping newlines so
/// byte offsets and line numbers are preserved.
fn mask(text: &str) -> Vec<u8> {
    let mut out = text.as_bytes().to_vec();
    for seg in scan(text) {
        if seg.kind != SegmentKind::Code {
            for b in &mut out[seg.start..seg.end] {
                if *b != b'\n' {
                    *b = b' ';
                }
            }
        }
    }
    out
}

fn has_word(text: &str, word: &str) -> bool {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .any(|w| w == word)
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'$' || b >= 0x80
}

/// Decides whether `header` (text between the previous statement boundary
/// and `{`) opens a method body, returning the method name.
pub(crate) fn signature_name(header: &str, language: Language) -> Option<String> {
    let mut header = header.trim();
    while let Some(m) = ACCESS_LABEL.find(header) {
        // keep the byte after the colon, it belongs to the signature
        let cut = header[..m.end()].rfind(':').unwrap() + 1;
        header = header[cut..].trim_start();
    }
    if header.is_empty() || header.starts_with('#') {
        return None;
    }
    let bytes = header.as_bytes();

    // C++ constructor initializer list: cut at the first lone ':' outside parens
    let mut end = header.len();
    if language == Language::Cpp {
        let mut depth = 0i32;
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b':' if depth == 0 => {
                    if i + 1 < bytes.len() && bytes[i + 1] == b':' {
                        i += 2;
                        continue;
                    }
                    if header[..i].contains(')') {
                        end = i;
                        break;
                    }
                }
                _ => {}
            }
            i += 1;
        }
    }
    let header = header[..end].trim_end();
    let bytes = header.as_bytes();

    let close = header.rfind(')')?;
    let tail = &header[close + 1..];
    let tail_ok = match language {
        Language::Java => tail.trim().is_empty() || JAVA_THROWS.is_match(tail),
        Language::Cpp => CPP_QUALIFIERS.is_match(tail),
    };
    if !tail_ok {
        return None;
    }
    let mut depth = 0i32;
    let mut open = None;
    for i in (0..=close).rev() {
        match bytes[i] {
            b')' => depth += 1,
            b'(' => {
                depth -= 1;
                if depth == 0 {
                    open = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let open = open?;
    let before = header[..open].trim_end();
    if before.contains('=') && !before.contains("operator") {
        return None;
    }
    let name_end = before.len();
    let name_start = before
        .bytes()
        .rposition(|b| !(is_ident_byte(b) || b == b':' || b == b'~'))
        .map_or(0, |p| p + 1);
    let name = before[name_start..name_end].trim_start_matches(':');
    if name.is_empty() || name.as_bytes()[0].is_ascii_digit() {
        return None;
    }
    let simple = name.rsplit("::").next().unwrap_or(name);
    if NOT_METHODS.contains(&simple) || simple.is_empty() {
        return None;
    }
    if language == Language::Java && name.contains(':') {
        return None;
    }
    Some(name.to_string())
}

fn is_container(header: &str, language: Language) -> bool {
    let head = header.split('(').next().unwrap_or(header);
    let keywords = match language {
        Language::Java => JAVA_CONTAINERS,
        Language::Cpp => CPP_CONTAINERS,
    };
    if language == Language::Cpp && head.contains('=') {
        return false;
    }
    if language == Language::Java {
        // `record` is contextual: only a declaration when a type name follows
        let words: Vec<&str> = head
            .split(|c: char| !(c.is_alphanumeric() || c == '_'))
            .filter(|w| !w.is_empty())
            .collect();
        return words
            .iter()
            .enumerate()
            .any(|(i, w)| keywords.contains(w) && (*w != "record" || i + 1 < words.len()));
    }
    keywords.iter().any(|k| has_word(head, k))
}

/// Finds method spans, or explains why the structure could not be matched.
fn find_methods(content: &str, language: Language) -> Result<Vec<MethodSpan>, String> {
    let masked = mask(content);
    let text = String::from_utf8_lossy(&masked).into_owned();
    let bytes = text.as_bytes();
    let mut methods: Vec<MethodSpan> = Vec::new();
    let mut stack = vec![Frame {
        kind: Block::Container,
        stmt_start: 0,
        method: None,
    }];
    let mut line_start = true;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if line_start && b == b'#' {
            // preprocessor directive: skip to end of (continued) line
            let mut j = i;
            while j < bytes.len() && bytes[j] != b'\n' {
                if bytes[j] == b'\\' && j + 1 < bytes.len() && bytes[j + 1] == b'\n' {
                    j += 1;
                }
                j += 1;
            }
            stack.last_mut().unwrap().stmt_start = j;
            i = j;
            continue;
        }
        if b == b'\n' {
            line_start = true;
        } else if !b.is_ascii_whitespace() {
            line_start = false;
        }
        match b {
            b'{' => {
                let top = stack.last().unwrap();
                let header_start = top.stmt_start;
                let parent = top.kind;
                let header = &text[header_start..i];
                let (kind, method) = if parent != Block::Container {
                    (Block::Other, None)
                } else if is_container(header, language) {
                    (Block::Container, None)
                } else if let Some(name) = signature_name(header, language) {
                    let start = header_start + header.len() - header.trim_start().len();
                    let start = skip_access_label(&text, start);
                    methods.push(MethodSpan {
                        name,
                        span: start..i,
                    });
                    (Block::Method, Some(methods.len() - 1))
                } else {
                    (Block::Other, None)
                };
                stack.push(Frame {
                    kind,
                    stmt_start: i + 1,
                    method,
                });
            }
            b'}' => {
                if stack.len() == 1 {
                    return Err(format!("unbalanced '}}' at byte {i}"));
                }
                let frame = stack.pop().unwrap();
                if let Some(m) = frame.method {
                    methods[m].span.end = i + 1;
                }
                stack.last_mut().unwrap().stmt_start = i + 1;
            }
            b';' => stack.last_mut().unwrap().stmt_start = i + 1,
            _ => {}
        }
        i += 1;
    }
    if stack.len() != 1 {
        return Err(format!("{} unclosed '{{' at end of file", stack.len() - 1));
    }
    Ok(methods)
}

fn skip_access_label(text: &str, start: usize) -> usize {
    let mut start = start;
    while let Some(m) = ACCESS_LABEL.find(&text[start..]) {
        let cut = text[start..start + m.end()].rfind(':').unwrap() + 1;
        start += cut;
        start += text[start..].len() - text[start..].trim_start().len();
    }
    start
}

fn tidy(text: &str) -> String {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Default)]
struct Accumulator {
    code: String,
    comments: Vec<String>,
    loc: u64,
}

/// Extracts the entities of one file.
///
/// At file granularity the result is a single entity. At method granularity
/// it is one entity per method name (overloads share an entity) followed by
/// the dummy method, which holds fields, imports, headers and every comment
/// outside method bodies.
pub fn extract_entities(
    file_path: &str,
    content: &str,
    language: Language,
    granularity: Granularity,
    snapshot: &str,
) -> ExtractedFile {
    let segments = scan(content);
    let line_starts = executable_line_starts(content);

    if granularity == Granularity::File {
        let acc = collect(
            content,
            &segments,
            &line_starts,
            std::slice::from_ref(&(0..content.len())),
            &[],
        );
        return ExtractedFile {
            entities: vec![acc.into_entity(file_path.to_string(), granularity, snapshot)],
            fallback: None,
        };
    }

    let (methods, fallback) = match find_methods(content, language) {
        Ok(m) => (m, None),
        Err(reason) => {
            let warning = ParseFallback {
                path: file_path.to_string(),
                reason,
            };
            log::warn!("{warning}");
            (Vec::new(), Some(warning))
        }
    };

    // group overloads by name, keeping first-appearance order
    let mut order: Vec<String> = Vec::new();
    let mut by_name: BTreeMap<String, Vec<Range<usize>>> = BTreeMap::new();
    for m in &methods {
        let spans = by_name.entry(m.name.clone()).or_default();
        if spans.is_empty() {
            order.push(m.name.clone());
        }
        spans.push(m.span.clone());
    }
    let all_spans: Vec<Range<usize>> = methods.iter().map(|m| m.span.clone()).collect();

    let mut entities = Vec::with_capacity(order.len() + 1);
    for name in &order {
        let acc = collect(content, &segments, &line_starts, &by_name[name], &[]);
        entities.push(acc.into_entity(method_entity_id(file_path, name), granularity, snapshot));
    }
    let dummy = collect(
        content,
        &segments,
        &line_starts,
        std::slice::from_ref(&(0..content.len())),
        &all_spans,
    );
    entities.push(dummy.into_entity(dummy_entity_id(file_path), granularity, snapshot));
    ExtractedFile { entities, fallback }
}

/// Gathers code, comments and owned lines inside `include` minus `exclude`.
fn collect(
    content: &str,
    segments: &[super::lexer::Segment],
    line_starts: &[usize],
    include: &[Range<usize>],
    exclude: &[Range<usize>],
) -> Accumulator {
    let inside = |pos: usize| {
        include.iter().any(|r| r.contains(&pos)) && !exclude.iter().any(|r| r.contains(&pos))
    };
    let mut acc = Accumulator::default();
    for seg in segments {
        let mut pieces: Vec<Range<usize>> = Vec::new();
        let mut cur: Option<usize> = None;
        for pos in seg.start..seg.end {
            match (inside(pos), cur) {
                (true, None) => cur = Some(pos),
                (false, Some(s)) => {
                    pieces.push(s..pos);
                    cur = None;
                }
                _ => {}
            }
        }
        if let Some(s) = cur {
            pieces.push(s..seg.end);
        }
        for piece in pieces {
            let Some(text) = content.get(piece.clone()) else {
                continue;
            };
            match seg.kind {
                SegmentKind::Code => acc.code.push_str(text),
                SegmentKind::Str => acc.code.push(' '),
                SegmentKind::Comment => {
                    let body = if piece == (seg.start..seg.end) {
                        comment_body(text)
                    } else {
                        text
                    };
                    let body = body.trim();
                    if !body.is_empty() {
                        acc.comments.push(body.to_string());
                    }
                }
            }
        }
        if !acc.code.ends_with('\n') && seg.kind != SegmentKind::Code {
            acc.code.push('\n');
        }
    }
    acc.loc = line_starts.iter().filter(|&&p| inside(p)).count() as u64;
    acc
}

impl Accumulator {
    fn into_entity(self, id: String, granularity: Granularity, snapshot: &str) -> SourceEntity {
        SourceEntity {
            id,
            granularity,
            identifier_text: tidy(&self.code),
            comment_text: self.comments.join("\n"),
            loc: self.loc,
            snapshot: snapshot.to_string(),
        }
    }
}
