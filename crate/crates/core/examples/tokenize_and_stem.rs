//! Turns bug-report text into index terms under each preprocessing code.
//!
//! ```text
//! cargo run --example tokenize_and_stem -- "NPE in MethodScope.recordInitializationStates"
//! ```

use bugloc::textprep::{preprocess, split_identifier, stem, tokenize, PreprocessSpec};

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| {
        "The analyseCode() of FieldDeclaration is not marking static_fields as definitely assigned".into()
    });
    let tokens = tokenize(&text);
    println!("tokens: {tokens:?}");
    for t in tokens.iter().filter(|t| split_identifier(t).len() > 1) {
        println!("  {t} splits into {:?}", split_identifier(t));
    }
    for spec in PreprocessSpec::ALL {
        println!(
            "{spec} (split={}, stop={}, stem={}): {:?}",
            spec.split,
            spec.stop,
            spec.stem,
            preprocess(&tokens, spec)
        );
    }
    for w in ["initialization", "marking", "assigned", "relational"] {
        println!("stem({w}) = {}", stem(w));
    }
}
