//! Splits a Java file into method entities plus its dummy method and
//! counts executable lines.

use bugloc::extraction::{count_loc, extract_entities, Granularity, Language};

const SOURCE: &str = r#"package demo;

import java.util.List;

/** A tiny scope. */
public class Scope {
    private int depth; // nesting depth

    /** Opens a nested scope. */
    public Scope enter() {
        depth++;
        return this;
    }

    public void record(List<String> names) {
        for (String n : names) {
            if (n.isEmpty()) { continue; }
            System.out.println(n);
        }
    }
}
"#;

fn main() {
    println!("file LOC: {}", count_loc(SOURCE));
    for granularity in [Granularity::File, Granularity::Method] {
        let file = extract_entities("demo/Scope.java", SOURCE, Language::Java, granularity, "s1");
        println!("{granularity:?} granularity:");
        for e in &file.entities {
            println!(
                "  {:<28} loc={:<2} identifiers={:?} comments={:?}",
                e.id, e.loc, e.identifier_text, e.comment_text
            );
        }
        if let Some(f) = file.fallback {
            println!("  fallback: {f}");
        }
    }
}
