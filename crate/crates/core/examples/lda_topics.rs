//! Trains LDA on two vocabularies and ranks documents for a query by
//! conditional probability.

use bugloc::models::{lda_rank, train_lda, Corpus};
use bugloc::textprep::Document;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ui = [
        "button", "dialog", "layout", "widget", "click", "menu", "panel", "scroll",
    ];
    let db = [
        "query", "index", "commit", "table", "lock", "cursor", "schema", "row",
    ];
    // long documents, so the smoothing prior (50/K) does not swamp the counts
    let docs: Vec<Document> = (0..12)
        .map(|i| {
            let vocab = if i % 2 == 0 { &ui } else { &db };
            let terms = (0..80).map(|j| vocab[(i * 7 + j * 3 + j / 5) % vocab.len()]);
            Document::from_terms(
                format!("{}{i:02}", if i % 2 == 0 { "ui" } else { "db" }),
                terms,
            )
        })
        .collect();
    let corpus = Corpus::from_documents(docs, vec![50; 12]);
    let model = train_lda(&corpus, 2, 42)?;
    println!(
        "{} Gibbs sweeps, converged: {}",
        model.iterations_run, model.converged
    );
    for z in 0..2 {
        let mut terms: Vec<(usize, f64)> =
            (0..model.num_terms).map(|t| (t, model.phi(z, t))).collect();
        terms.sort_by(|a, b| b.1.total_cmp(&a.1));
        let top: Vec<&str> = terms
            .iter()
            .take(5)
            .map(|(t, _)| corpus.dictionary().term(*t))
            .collect();
        println!("topic {z}: {top:?}");
    }
    let query = Document::from_terms("q", ["dialog", "click"]);
    let ranked = lda_rank(&query, &corpus, &model)?;
    for e in ranked.entries.iter().take(4) {
        println!("  {} {:.3}", e.entity, e.score);
    }
    Ok(())
}
