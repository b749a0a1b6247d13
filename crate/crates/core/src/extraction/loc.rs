use super::lexer::executable_line_starts;

/// Counts executable lines: non-blank lines with at least one character
/// outside comments. A code line with a trailing comment counts.
pub fn count_loc(text: &str) -> u64 {
    executable_line_starts(text).len() as u64
}
