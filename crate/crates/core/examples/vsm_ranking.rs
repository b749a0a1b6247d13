//! Ranks a small corpus with every VSM weighting and similarity.

use bugloc::models::{Corpus, IdfMode, Similarity, TermWeight, VsmIndex};
use bugloc::textprep::Document;

fn main() {
    let docs = vec![
        Document::from_terms(
            "Parser.java",
            ["parse", "token", "token", "error", "recover"],
        ),
        Document::from_terms("Lexer.java", ["token", "scan", "char", "buffer"]),
        Document::from_terms("Flow.java", ["flow", "assign", "init", "static", "field"]),
        Document::from_terms("Field.java", ["field", "static", "init", "constant"]),
    ];
    let loc = vec![420, 180, 310, 95];
    let corpus = Corpus::from_documents(docs, loc);
    let query = Document::from_terms("bug-1", ["static", "field", "init", "error"]);

    for weight in TermWeight::ALL {
        let index = VsmIndex::new(&corpus, weight, IdfMode::Log);
        for sim in Similarity::ALL {
            let ranked = index.rank(&query, sim);
            let row: Vec<String> = ranked
                .entries
                .iter()
                .map(|e| format!("{}={:.3}", e.entity, e.score))
                .collect();
            println!("D{} E{}: {}", weight.code(), sim.code(), row.join("  "));
        }
    }
}
