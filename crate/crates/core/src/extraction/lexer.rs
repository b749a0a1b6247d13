//! Comment/string-aware scanning shared by Java and C++ sources.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SegmentKind {
    Code,
    Comment,
    Str,
}

/// A byte range of the source, delimiters included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

/// Splits `text` into code, comment and string-literal segments. The
/// segments are contiguous and cover the whole input.
pub(crate) fn scan(text: &str) -> Vec<Segment> {
    let bytes = text.as_bytes();
    let n = bytes.len();
    let mut segments = Vec::new();
    let mut code_start = 0;
    let mut i = 0;
    let push = |segments: &mut Vec<Segment>, kind, start, end| {
        if end > start {
            segments.push(Segment { kind, start, end });
        }
    };
    while i < n {
        let special = match bytes[i] {
            b'/' if i + 1 < n && bytes[i + 1] == b'/' => {
                let end = find_byte(bytes, i + 2, b'\n').unwrap_or(n);
                Some((SegmentKind::Comment, end))
            }
            b'/' if i + 1 < n && bytes[i + 1] == b'*' => {
                let end = find_seq(bytes, i + 2, b"*/").map_or(n, |p| p + 2);
                Some((SegmentKind::Comment, end))
            }
            b'"' if bytes[i..].starts_with(b"\"\"\"") => {
                let end = find_seq(bytes, i + 3, b"\"\"\"").map_or(n, |p| p + 3);
                Some((SegmentKind::Str, end))
            }
            b'R' if bytes[i..].starts_with(b"R\"") && !prev_is_ident(bytes, i) => {
                raw_string_end(bytes, i).map(|end| (SegmentKind::Str, end))
            }
            b'"' => Some((
                SegmentKind::Str,
                quoted_end(bytes, i, b'"').unwrap_or_else(|| line_end(bytes, i)),
            )),
            b'\'' => quoted_end(bytes, i, b'\'').map(|end| (SegmentKind::Str, end)),
            _ => None,
        };
        match special {
            Some((kind, end)) => {
                push(&mut segments, SegmentKind::Code, code_start, i);
                push(&mut segments, kind, i, end);
                i = end;
                code_start = end;
            }
            None => i += 1,
        }
    }
    push(&mut segments, SegmentKind::Code, code_start, n);
    segments
}

fn prev_is_ident(bytes: &[u8], i: usize) -> bool {
    i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_')
}

fn find_byte(bytes: &[u8], from: usize, b: u8) -> Option<usize> {
    bytes[from.min(bytes.len())..]
        .iter()
        .position(|&x| x == b)
        .map(|p| p + from)
}

fn find_seq(bytes: &[u8], from: usize, seq: &[u8]) -> Option<usize> {
    if from >= bytes.len() {
        return None;
    }
    bytes[from..]
        .windows(seq.len())
        .position(|w| w == seq)
        .map(|p| p + from)
}

fn line_end(bytes: &[u8], from: usize) -> usize {
    find_byte(bytes, from, b'\n').unwrap_or(bytes.len())
}

/// End (exclusive) of a quoted literal starting at `start`, or `None` when
/// the closing quote is missing on the same line.
fn quoted_end(bytes: &[u8], start: usize, quote: u8) -> Option<usize> {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => return None,
            b if b == quote => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

/// C++ raw string `R"delim( ... )delim"`.
fn raw_string_end(bytes: &[u8], start: usize) -> Option<usize> {
    let open = find_byte(bytes, start + 2, b'(')?;
    let delim = &bytes[start + 2..open];
    if delim.len() > 16 || delim.iter().any(|b| b.is_ascii_whitespace() || *b == b'"') {
        return None;
    }
    let mut close = Vec::with_capacity(delim.len() + 2);
    close.push(b')');
    close.extend_from_slice(delim);
    close.push(b'"');
    find_seq(bytes, open + 1, &close).map(|p| p + close.len())
}

/// Text of a comment without its `//`, `/*` or `*/` markers.
pub(crate) fn comment_body(text: &str) -> &str {
    if let Some(rest) = text.strip_prefix("//") {
        rest
    } else if let Some(rest) = text.strip_prefix("/*") {
        rest.strip_suffix("*/").unwrap_or(rest)
    } else {
        text
    }
}

/// Byte offset of the first code character on each executable line.
///
/// A line is executable when it holds at least one non-blank character
/// outside comments; string literals count as code.
pub(crate) fn executable_line_starts(text: &str) -> Vec<usize> {
    let bytes = text.as_bytes();
    let mut starts = Vec::new();
    let mut line_has_code = false;
    for seg in scan(text) {
        for (pos, &b) in bytes.iter().enumerate().take(seg.end).skip(seg.start) {
            if b == b'\n' {
                line_has_code = false;
            } else if !line_has_code && seg.kind != SegmentKind::Comment && !b.is_ascii_whitespace()
            {
                line_has_code = true;
                starts.push(pos);
            }
        }
    }
    starts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(SegmentKind, &str)> {
        scan(text)
            .into_iter()
            .map(|s| (s.kind, &text[s.start..s.end]))
            .collect()
    }

    #[test]
    fn segments_cover_input() {
        let text = "int a = 1; // c\n/* b */ s = \"x//y\"; c = '\\'';";
        let segs = scan(text);
        assert_eq!(segs.first().unwrap().start, 0);
        assert_eq!(segs.last().unwrap().end, text.len());
        for w in segs.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        let k = kinds(text);
        assert!(k.contains(&(SegmentKind::Comment, "// c")));
        assert!(k.contains(&(SegmentKind::Comment, "/* b */")));
        assert!(k.contains(&(SegmentKind::Str, "\"x//y\"")));
        assert!(k.contains(&(SegmentKind::Str, "'\\''")));
    }

    #[test]
    fn unterminated_block_comment_runs_to_end() {
        assert_eq!(
            kinds("x /* open"),
            vec![(SegmentKind::Code, "x "), (SegmentKind::Comment, "/* open")]
        );
    }

    #[test]
    fn raw_and_text_block_strings() {
        let k = kinds("auto s = R\"x(a \" // b)x\"; y");
        assert!(k.contains(&(SegmentKind::Str, "R\"x(a \" // b)x\"")));
        let k = kinds("String s = \"\"\"\n // not comment\n\"\"\";");
        assert!(k.iter().all(|(kind, _)| *kind != SegmentKind::Comment));
    }

    #[test]
    fn comment_markers_stripped() {
        assert_eq!(comment_body("// hi"), " hi");
        assert_eq!(comment_body("/*doc*/"), "doc");
        assert_eq!(comment_body("/* open"), " open");
    }
}
