//! Raw tokenization and identifier splitting.

/// Splits `text` into maximal runs of alphanumeric and underscore characters.
///
/// Tokens without any alphabetic character (`293777`, `__`) and tokens of a
/// single character are dropped. Case is preserved so that identifier
/// splitting can still see camel-case boundaries.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' {
            current.push(ch);
        } else if !current.is_empty() {
            push_token(&mut tokens, std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        push_token(&mut tokens, current);
    }
    tokens
}

fn push_token(tokens: &mut Vec<String>, token: String) {
    if token.chars().count() > 1 && token.chars().any(char::is_alphabetic) {
        tokens.push(token);
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Upper,
    Lower,
    Digit,
}

fn classify(ch: char) -> CharClass {
    if ch.is_numeric() {
        CharClass::Digit
    } else if ch.is_uppercase() {
        CharClass::Upper
    } else {
        CharClass::Lower
    }
}

/// Splits an identifier at underscores, lower→upper transitions and
/// letter/digit transitions. A run of capitals stays together until the
/// capital that starts a lower-case word (`XMLParser` → `XML`, `Parser`).
///
/// The original identifier is not kept; only its parts are returned, with
/// their case intact.
pub fn split_identifier(token: &str) -> Vec<String> {
    let mut parts = Vec::new();
    for chunk in token.split('_').filter(|c| !c.is_empty()) {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let prev = classify(chars[i - 1]);
            let cur = classify(chars[i]);
            let boundary = match (prev, cur) {
                (CharClass::Lower, CharClass::Upper) => true,
                (CharClass::Digit, CharClass::Upper | CharClass::Lower) => true,
                (CharClass::Upper | CharClass::Lower, CharClass::Digit) => true,
                (CharClass::Upper, CharClass::Upper) => chars
                    .get(i + 1)
                    .is_some_and(|&next| classify(next) == CharClass::Lower),
                _ => false,
            };
            if boundary {
                parts.push(chars[start..i].iter().collect());
                start = i;
            }
        }
        parts.push(chars[start..].iter().collect());
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_has_no_tokens() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn numeric_and_single_char_tokens_are_dropped() {
        assert_eq!(tokenize("Fixed Bug #293777"), vec!["Fixed", "Bug"]);
        assert_eq!(tokenize("a b cd 42 x1"), vec!["cd", "x1"]);
    }

    #[test]
    fn call_expression_yields_identifiers() {
        assert_eq!(
            tokenize("recordInitializationStates(flowInfo)"),
            vec!["recordInitializationStates", "flowInfo"]
        );
    }

    #[test]
    fn underscores_stay_inside_tokens() {
        assert_eq!(tokenize("MAX_VALUE=3;"), vec!["MAX_VALUE"]);
    }

    #[test]
    fn camel_case_split() {
        assert_eq!(
            split_identifier("recordInitializationStates"),
            vec!["record", "Initialization", "States"]
        );
        assert_eq!(split_identifier("theCount"), vec!["the", "Count"]);
    }

    #[test]
    fn acronym_run_is_kept_together() {
        assert_eq!(split_identifier("XMLParser"), vec!["XML", "Parser"]);
        assert_eq!(split_identifier("parseXML"), vec!["parse", "XML"]);
        assert_eq!(split_identifier("HTTP"), vec!["HTTP"]);
    }

    #[test]
    fn digits_and_underscores_split() {
        assert_eq!(split_identifier("utf8Decoder"), vec!["utf", "8", "Decoder"]);
        assert_eq!(split_identifier("MAX_VALUE"), vec!["MAX", "VALUE"]);
        assert_eq!(split_identifier("__init__"), vec!["init"]);
    }
}
