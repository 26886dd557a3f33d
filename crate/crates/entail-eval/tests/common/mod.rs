//! Shared test world: a scripted backend that answers every prompt the
//! ten-item fixture dataset can produce, deterministically and
//! independently of the request seed. Regenerating the replay cache with
//! it therefore yields identical responses for every seed.

use std::path::PathBuf;

use entail_eval::gateway::{ChatRequest, Gateway, GatewayOptions, ScriptedBackend, TranscriptCache};
use entail_eval::harness::{ingest, DatasetFile, DatasetFormat};
use entail_eval::model::EvalItem;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn dataset_path() -> PathBuf {
    fixtures_dir().join("eval10.jsonl")
}

pub fn replay_cache_path() -> PathBuf {
    fixtures_dir().join("replay_cache.jsonl")
}

pub fn fixture_items() -> Vec<EvalItem> {
    let dataset = DatasetFile {
        path: dataset_path(),
        format: DatasetFormat::Normalized,
        field_map: None,
    };
    let ingested = ingest(&dataset, 0.0).expect("fixture dataset is valid");
    assert!(ingested.line_errors.is_empty());
    ingested.items
}

pub fn replay_gateway() -> Gateway {
    let cache = TranscriptCache::load_read_only(&replay_cache_path())
        .expect("replay cache fixture loads");
    Gateway::replay_only(cache)
}

const IRON_EXPLANATION: &str = "1. Iron is absorbed in the body in the duodenum. (Given in S1)\n2. The duodenum is the first part of the small intestine. [[INFO]]\n3. Therefore, iron is absorbed in the small intestine. (Combining steps 1 and 2)";

const OAK_EXPLANATION: &str = "1. The TV show the Curse of Oak Island is filmed on Oak Island. (Given in S1)\n2. Oak Island is located in Nova Scotia, Canada. [[INFO]]\n3. Therefore, the TV show the Curse of Oak Island is filmed in Nova Scotia, Canada. (Combining steps 1 and 2)";

const WWII_EXPLANATION: &str = "1. World War II ended in 1945. (Given in S1)\n2. The atomic bombings of Hiroshima and Nagasaki took place in August 1945. [[INFO]]\n3. Japan surrendered shortly after the bombings. [[INFO]]\n4. Therefore, the war ended after the atomic bombings, assuming the war refers to World War II. [[ASSUMPTION]]";

const REEF_EXPLANATION: &str = "1. The Great Barrier Reef is located off the coast of Queensland. (Given in S1)\n2. Therefore, the reef is in the Coral Sea, which lies off the Queensland coast. (Restating S1)";

const WALL_EXPLANATION: &str = "1. The Great Wall of China is 21,196 km long. (Given in S1)\n2. 21,196 km is more than 20,000 kilometers. [[INFO]]\n3. Therefore, the Great Wall is over 20,000 kilometers long, assuming km and kilometers denote the same unit. [[ASSUMPTION]]";

fn qa2d_response(question: &str, answer: &str) -> Option<String> {
    let statement = match (question, answer) {
        ("Where in the body is iron absorbed?", "in the duodenum") => {
            "Iron is absorbed in the body in the duodenum."
        }
        ("Where in the body is iron absorbed?", "Iron is absorbed in the small intestine.") => {
            "Iron is absorbed in the small intestine."
        }
        ("Where is the TV show the Curse of Oak Island filmed?", "Oak Island") => {
            "The TV show the Curse of Oak Island is filmed on Oak Island."
        }
        ("Where is the TV show the Curse of Oak Island filmed?", "in Nova Scotia, Canada") => {
            "The TV show the Curse of Oak Island is filmed in Nova Scotia, Canada."
        }
        (
            "Where is the TV show the Curse of Oak Island filmed?",
            "The TV show the Curse of Oak Island is filmed on Oak Island in Nova Scotia, Canada.",
        ) => "The TV show the Curse of Oak Island is filmed on Oak Island in Nova Scotia, Canada.",
        ("Who founded the Achaemenid Empire?", "Cyrus the Great") => {
            "Cyrus the Great founded the Achaemenid Empire."
        }
        ("Who sang Total Eclipse of the Heart?", "Bonnie Tyler") => {
            "Bonnie Tyler sang Total Eclipse of the Heart."
        }
        ("Who sang Total Eclipse of the Heart?", "Gaynor Hopkins") => {
            "Gaynor Hopkins sang Total Eclipse of the Heart."
        }
        ("What is the capital of Australia?", "Canberra") => "The capital of Australia is Canberra.",
        ("What is the capital of Australia?", "Sydney") => "The capital of Australia is Sydney.",
        ("When did World War II end?", "1945") => "World War II ended in 1945.",
        ("When did World War II end?", "The war ended after the atomic bombings.") => {
            "World War II ended after the atomic bombings."
        }
        ("Where is the Great Barrier Reef located?", "off the coast of Queensland") => {
            "The Great Barrier Reef is located off the coast of Queensland."
        }
        ("Where is the Great Barrier Reef located?", "It is in the Coral Sea.") => {
            "The Great Barrier Reef is located in the Coral Sea."
        }
        ("How long is the Great Wall of China?", "21,196 km") => {
            "The Great Wall of China is 21,196 km long."
        }
        ("How long is the Great Wall of China?", "It is over 20,000 kilometers long.") => {
            "The Great Wall of China is over 20,000 kilometers long."
        }
        ("What is the chemical symbol for gold?", "Au") => "The chemical symbol for gold is Au.",
        _ => return None,
    };
    Some(statement.to_owned())
}

fn nli_response(premise: &str, hypothesis: &str) -> String {
    const ENTAILING: [(&str, &str); 6] = [
        (
            "Iron is absorbed in the body in the duodenum.",
            "Iron is absorbed in the small intestine.",
        ),
        (
            "The TV show the Curse of Oak Island is filmed on Oak Island.",
            "The TV show the Curse of Oak Island is filmed in Nova Scotia, Canada.",
        ),
        (
            "The TV show the Curse of Oak Island is filmed on Oak Island in Nova Scotia, Canada.",
            "The TV show the Curse of Oak Island is filmed on Oak Island.",
        ),
        (
            "World War II ended in 1945.",
            "World War II ended after the atomic bombings.",
        ),
        (
            "The Great Barrier Reef is located off the coast of Queensland.",
            "The Great Barrier Reef is located in the Coral Sea.",
        ),
        (
            "The Great Wall of China is 21,196 km long.",
            "The Great Wall of China is over 20,000 kilometers long.",
        ),
    ];
    if premise == hypothesis || ENTAILING.contains(&(premise, hypothesis)) {
        return "entailment".to_owned();
    }
    if premise.starts_with("The capital of Australia") && hypothesis.starts_with("The capital of Australia")
    {
        return "Contradiction.".to_owned();
    }
    if premise == "The Great Wall of China is over 20,000 kilometers long." {
        return "The relationship is neutral.".to_owned();
    }
    "neutral".to_owned()
}

fn explanation_for(system_statement: &str) -> Option<&'static str> {
    match system_statement {
        "Iron is absorbed in the small intestine." => Some(IRON_EXPLANATION),
        "The TV show the Curse of Oak Island is filmed in Nova Scotia, Canada." => {
            Some(OAK_EXPLANATION)
        }
        "World War II ended after the atomic bombings." => Some(WWII_EXPLANATION),
        "The Great Barrier Reef is located in the Coral Sea." => Some(REEF_EXPLANATION),
        "The Great Wall of China is over 20,000 kilometers long." => Some(WALL_EXPLANATION),
        _ => None,
    }
}

fn rating_for(system_statement: &str) -> Option<&'static str> {
    match system_statement {
        "Iron is absorbed in the small intestine." => Some("2"),
        "The TV show the Curse of Oak Island is filmed in Nova Scotia, Canada." => Some("2"),
        "World War II ended after the atomic bombings." => Some("4"),
        "The Great Barrier Reef is located in the Coral Sea." => Some("1"),
        "The Great Wall of China is over 20,000 kilometers long." => Some("3"),
        _ => None,
    }
}

fn direct_rating_for(system_answer: &str) -> &'static str {
    match system_answer {
        "Iron is absorbed in the small intestine." => "4",
        "in Nova Scotia, Canada" => "4",
        "The war ended after the atomic bombings." => "2",
        "It is in the Coral Sea." => "5",
        "It is over 20,000 kilometers long." => "2",
        "Sydney" => "1",
        _ => "5",
    }
}

fn line_after<'a>(text: &'a str, marker: &str) -> Option<&'a str> {
    text.split(marker).nth(1)?.lines().next()
}

fn respond(request: &ChatRequest) -> Option<String> {
    let prompt = &request.messages.last()?.content;
    if request.messages.len() == 3 {
        // rating follow-up; the original explain prompt names the pair
        let s2 = line_after(&request.messages[0].content, "\nS2: ")?;
        return rating_for(s2).map(str::to_owned);
    }
    if prompt.starts_with("We have two statements") {
        let s2 = line_after(prompt, "\nS2: ")?;
        return explanation_for(s2).map(str::to_owned);
    }
    if prompt.starts_with("Here is a question") {
        let answer = line_after(prompt, "\nAI answer: ")?;
        return Some(direct_rating_for(answer).to_owned());
    }
    if prompt.contains("Premise: ") {
        let premise = line_after(prompt, "Premise: ")?;
        let hypothesis = line_after(prompt, "Hypothesis: ")?;
        return Some(nli_response(premise, hypothesis));
    }
    // QA2D: the pair under conversion is the last Q/A block
    let tail = prompt.rsplit("\nQ: ").next()?;
    let question = tail.split("\nA: ").next()?;
    let answer = tail.split("\nA: ").nth(1)?.split("\nS:").next()?;
    qa2d_response(question, answer)
}

/// A gateway over the scripted world, writing through to `cache`.
pub fn world_gateway(cache: TranscriptCache) -> Gateway {
    let backend = ScriptedBackend::from_fn("openai", respond);
    Gateway::new(Box::new(backend), cache, GatewayOptions::default())
}
