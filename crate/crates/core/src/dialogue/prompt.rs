//! The five-section dynamic prompt, rebuilt at every area transition.

use super::DialogueError;
use crate::geometry::Pose;
use crate::museum::{AreaId, ArtworkId, MuseumMap};
use crate::nav::RelativeDirection;
use crate::transcript::ChatMessage;
use serde::{Deserialize, Serialize};

/// Section headers in render order.
pub const SECTION_HEADERS: [&str; 5] = [
    "### GENERAL ROBOT INFORMATION",
    "### CURRENT LOCATION",
    "### PROGRESS OF THE VISIT",
    "### KNOWLEDGE BASE",
    "### CHAT HISTORY",
];

/// One artwork fact annotated with where the artwork is relative to the robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeEntry {
    pub artwork_id: ArtworkId,
    pub title: String,
    pub author: String,
    pub direction: RelativeDirection,
    pub fact: String,
}

impl KnowledgeEntry {
    pub fn render(&self) -> String {
        format!(
            "- [{}] \"{}\" by {}: {}",
            self.direction.as_str(),
            self.title,
            self.author,
            self.fact
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub robot_info: String,
    pub current_location: String,
    pub visited: Vec<String>,
    pub unvisited: Vec<String>,
    pub knowledge: Vec<KnowledgeEntry>,
    pub history: Vec<ChatMessage>,
}

impl PromptBundle {
    /// Text of the most recent visitor message in the history window.
    pub fn last_visitor_text(&self) -> Option<&str> {
        self.history
            .iter()
            .rev()
            .find(|m| m.role == crate::transcript::Role::Visitor)
            .map(|m| m.text.as_str())
    }
}

/// Inputs to [`build_prompt`].
#[derive(Debug, Clone, Copy)]
pub struct PromptInputs<'a> {
    pub robot_info: &'a str,
    pub current_area: &'a AreaId,
    /// Tour areas already explored, in visiting order.
    pub visited: &'a [AreaId],
    pub robot_pose: Pose,
    pub history: &'a [ChatMessage],
    pub history_window: usize,
}

/// Assembles the prompt for the robot's current situation. The knowledge
/// section only carries artworks owned by the current area, so the prompt
/// size does not grow with the museum.
pub fn build_prompt(museum: &MuseumMap, inputs: PromptInputs<'_>) -> Result<PromptBundle, DialogueError> {
    let current = museum
        .area(inputs.current_area)
        .ok_or_else(|| DialogueError::UnknownArea(inputs.current_area.to_string()))?;
    let mut visited = Vec::with_capacity(inputs.visited.len());
    for id in inputs.visited {
        let area = museum
            .area(id)
            .filter(|a| a.id != museum.entrance_area_id)
            .ok_or_else(|| DialogueError::UnknownArea(id.to_string()))?;
        if !visited.contains(&area.name) {
            visited.push(area.name.clone());
        }
    }
    let unvisited = museum
        .tour_areas()
        .filter(|a| !inputs.visited.contains(&a.id))
        .map(|a| a.name.clone())
        .collect();

    let knowledge = museum
        .artworks_in(&current.id)
        .flat_map(|art| {
            let direction = RelativeDirection::of(&inputs.robot_pose, art.position);
            art.facts.iter().map(move |fact| KnowledgeEntry {
                artwork_id: art.id.clone(),
                title: art.title.clone(),
                author: art.author.clone(),
                direction,
                fact: fact.clone(),
            })
        })
        .collect();

    let skip = inputs.history.len().saturating_sub(inputs.history_window);
    Ok(PromptBundle {
        robot_info: inputs.robot_info.to_string(),
        current_location: current.name.clone(),
        visited,
        unvisited,
        knowledge,
        history: inputs.history[skip..].to_vec(),
    })
}

fn list_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(", ")
    }
}

/// Deterministic text form of a bundle.
pub fn render_prompt(bundle: &PromptBundle) -> String {
    let mut out = String::new();
    out.push_str(SECTION_HEADERS[0]);
    out.push('\n');
    out.push_str(bundle.robot_info.trim_end());
    out.push_str("\n\n");

    out.push_str(SECTION_HEADERS[1]);
    out.push('\n');
    out.push_str(&format!("You are in the {} area.\n\n", bundle.current_location));

    out.push_str(SECTION_HEADERS[2]);
    out.push('\n');
    out.push_str(&format!("Areas already explored: {}\n", list_or_none(&bundle.visited)));
    out.push_str(&format!(
        "Areas not yet explored: {}\n\n",
        list_or_none(&bundle.unvisited)
    ));

    out.push_str(SECTION_HEADERS[3]);
    out.push('\n');
    if bundle.knowledge.is_empty() {
        out.push_str("(no artworks in this area)\n");
    }
    for entry in &bundle.knowledge {
        out.push_str(&entry.render());
        out.push('\n');
    }
    out.push('\n');

    out.push_str(SECTION_HEADERS[4]);
    out.push('\n');
    for msg in &bundle.history {
        out.push_str(msg.role.as_str());
        out.push_str(": ");
        out.push_str(&msg.text);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::museum::{load_museum, Artwork};
    use crate::transcript::Role;

    fn museum() -> MuseumMap {
        load_museum(include_str!("../../fixtures/museum.json")).unwrap()
    }

    fn inputs<'a>(area: &'a AreaId, visited: &'a [AreaId], history: &'a [ChatMessage]) -> PromptInputs<'a> {
        PromptInputs {
            robot_info: "You are a guide robot.",
            current_area: area,
            visited,
            robot_pose: Pose::new(23.0, 5.0, -std::f64::consts::FRAC_PI_2),
            history,
            history_window: 20,
        }
    }

    #[test]
    fn location_and_progress() {
        let m = museum();
        let here = AreaId::from("ports-of-europe");
        let visited = [AreaId::from("sails")];
        let b = build_prompt(&m, inputs(&here, &visited, &[])).unwrap();
        assert_eq!(b.current_location, "Ports of Europe");
        assert_eq!(b.visited, ["Sails"]);
        assert_eq!(b.unvisited.len(), 6);
        assert!(!b.unvisited.contains(&"Sails".to_string()));
        assert!(!b.unvisited.contains(&"Entrance".to_string()));
        assert!(b.history.is_empty());
        let text = render_prompt(&b);
        assert!(text.contains("You are in the Ports of Europe area."));
        assert!(text.contains("Areas already explored: Sails\n"));
        assert!(text.ends_with("### CHAT HISTORY\n"));
    }

    #[test]
    fn knowledge_restricted_to_current_area_with_directions() {
        let m = museum();
        let here = AreaId::from("ports-of-europe");
        let b = build_prompt(&m, inputs(&here, &[], &[])).unwrap();
        let ids: Vec<_> = b.knowledge.iter().map(|k| k.artwork_id.as_str()).collect();
        assert_eq!(ids, ["ports-01", "ports-01", "ports-02", "ports-02"]);
        // robot at (23, 5) facing -y: ports-01 at (21, 0.75) is ahead (bearing ~ -25 deg),
        // ports-02 at (24.75, 9.25) is behind
        assert_eq!(b.knowledge[0].direction, RelativeDirection::Ahead);
        assert_eq!(b.knowledge[2].direction, RelativeDirection::Behind);
    }

    #[test]
    fn unrelated_artworks_do_not_change_the_prompt() {
        let m = museum();
        let mut augmented = m.clone();
        for i in 0..100 {
            augmented.artworks.push(Artwork {
                id: format!("extra-{i}").into(),
                title: format!("Extra {i}"),
                author: "Nobody".into(),
                position: Point::new(35.0, 20.0),
                facts: vec![format!("Extra fact number {i}")],
                trigger_radius: 1.0,
                passing_utterance: "extra".into(),
            });
        }
        let here = AreaId::from("sails");
        let hist = [ChatMessage::new(Role::Visitor, "hello", 1.0)];
        let a = render_prompt(&build_prompt(&m, inputs(&here, &[], &hist)).unwrap());
        let b = render_prompt(&build_prompt(&augmented, inputs(&here, &[], &hist)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn history_window_keeps_most_recent() {
        let m = museum();
        let here = AreaId::from("sails");
        let hist: Vec<_> = (0..30)
            .map(|i| ChatMessage::new(Role::Visitor, format!("m{i}"), i as f64))
            .collect();
        let mut inp = inputs(&here, &[], &hist);
        inp.history_window = 20;
        let b = build_prompt(&m, inp).unwrap();
        assert_eq!(b.history.len(), 20);
        assert_eq!(b.history[0].text, "m10");
        inp.history_window = 0;
        let b = build_prompt(&m, inp).unwrap();
        let text = render_prompt(&b);
        assert!(text.ends_with("### CHAT HISTORY\n"));
    }

    #[test]
    fn unknown_area_is_an_error() {
        let m = museum();
        let bad = AreaId::from("cafeteria");
        assert!(matches!(
            build_prompt(&m, inputs(&bad, &[], &[])),
            Err(DialogueError::UnknownArea(_))
        ));
        let here = AreaId::from("sails");
        let visited = [AreaId::from("entrance")];
        assert!(build_prompt(&m, inputs(&here, &visited, &[])).is_err());
    }

    #[test]
    fn headers_once_each_in_order() {
        let m = museum();
        let here = AreaId::from("emigration");
        let text = render_prompt(&build_prompt(&m, inputs(&here, &[], &[])).unwrap());
        let mut last = 0;
        for h in SECTION_HEADERS {
            assert_eq!(text.matches(h).count(), 1);
            let at = text.find(h).unwrap();
            assert!(at >= last);
            last = at;
        }
    }
}
