//! The default six-class indoor benchmark.
//!
//! Classes come in pairs that share their object layout exactly (same linked
//! detections, emission rates and placement regions) and differ only in
//! segmentation: bedroom/guest_room, living_room/lounge, kitchen/pantry.
//! Object features alone therefore separate the pairs but not their members.
//! Bedroom and living_room share their segmentation layout; the living-room
//! sofa is drawn with the bed's category with probability `ambiguity`, which
//! segmentation features alone cannot tell apart but object features can.

use crate::types::LabelMap;

use super::{
    DatasetConfig, ElementSpec, ObjectLink, Region, Relabel, SceneConfig, SceneTemplate,
    ShapeFamily::{self, Ellipse, Rectangle, Triangle},
};

pub const DEFAULT_AMBIGUITY: f64 = 0.5;

const SEG_NAMES: [&str; 13] = [
    "wall",
    "floor",
    "bed",
    "sofa",
    "table",
    "cabinet",
    "window",
    "counter",
    "appliance",
    "shelf",
    "lamp",
    "rug",
    "chair",
];
const OBJ_NAMES: [&str; 10] = [
    "person",
    "chair",
    "couch",
    "bed",
    "dining_table",
    "tv",
    "oven",
    "sink",
    "book",
    "potted_plant",
];
const CLASS_NAMES: [&str; 6] = [
    "bedroom",
    "guest_room",
    "living_room",
    "lounge",
    "kitchen",
    "pantry",
];

const WALL: u16 = 1;
const FLOOR: u16 = 2;
const BED: u16 = 3;
const SOFA: u16 = 4;
const TABLE: u16 = 5;
const CABINET: u16 = 6;
const WINDOW: u16 = 7;
const COUNTER: u16 = 8;
const APPLIANCE: u16 = 9;
const SHELF: u16 = 10;
const LAMP: u16 = 11;
const RUG: u16 = 12;
const CHAIR: u16 = 13;

const OBJ_CHAIR: u32 = 2;
const OBJ_COUCH: u32 = 3;
const OBJ_BED: u32 = 4;
const OBJ_TV: u32 = 6;
const OBJ_OVEN: u32 = 7;
const OBJ_SINK: u32 = 8;

/// Centre regions of linked furniture, shared within each class pair.
const MAIN: Region = Region::new(0.35, 0.6, 0.65, 0.72);
const SIDE: Region = Region::new(0.78, 0.45, 0.88, 0.6);
const BAND: Region = Region::new(0.4, 0.7, 0.6, 0.78);

pub fn default_labels() -> LabelMap {
    LabelMap::new(
        SEG_NAMES.iter().map(|s| s.to_string()).collect(),
        OBJ_NAMES.iter().map(|s| s.to_string()).collect(),
    )
    .expect("default vocabularies are unique")
}

fn el(
    seg_category: u16,
    family: ShapeFamily,
    width: (f64, f64),
    height: (f64, f64),
    region: Region,
) -> ElementSpec {
    ElementSpec {
        seg_category,
        presence: 1.0,
        count: (1, 1),
        family,
        width,
        height,
        region,
        object: None,
        relabel: None,
    }
}

impl ElementSpec {
    fn presence(mut self, p: f64) -> Self {
        self.presence = p;
        self
    }

    fn count(mut self, lo: u32, hi: u32) -> Self {
        self.count = (lo, hi);
        self
    }

    fn emits(mut self, category: u32, probability: f64) -> Self {
        self.object = Some(ObjectLink {
            category,
            probability,
        });
        self
    }

    fn relabel(mut self, category: u16, probability: f64) -> Self {
        self.relabel = Some(Relabel {
            category,
            probability,
        });
        self
    }
}

fn room(extra: Vec<ElementSpec>) -> Vec<ElementSpec> {
    let mut elements = vec![
        el(
            WALL,
            Rectangle,
            (1.0, 1.0),
            (0.38, 0.46),
            Region::point(0.5, 0.2),
        ),
        el(
            FLOOR,
            Rectangle,
            (1.0, 1.0),
            (0.38, 0.46),
            Region::point(0.5, 0.8),
        ),
    ];
    elements.extend(extra);
    elements.push(
        el(
            CHAIR,
            Ellipse,
            (0.06, 0.1),
            (0.08, 0.12),
            Region::new(0.1, 0.55, 0.9, 0.92),
        )
        .presence(0.7)
        .count(1, 3)
        .emits(OBJ_CHAIR, 0.9),
    );
    elements
}

/// Main furniture and dressing shared by bedroom and living_room.
fn bedroom_like(main: ElementSpec, side: ElementSpec) -> Vec<ElementSpec> {
    room(vec![
        el(
            WINDOW,
            Rectangle,
            (0.15, 0.25),
            (0.12, 0.2),
            Region::new(0.2, 0.12, 0.8, 0.22),
        )
        .presence(0.8),
        el(
            LAMP,
            Ellipse,
            (0.05, 0.08),
            (0.1, 0.16),
            Region::new(0.1, 0.4, 0.2, 0.5),
        )
        .presence(0.8),
        side,
        main,
    ])
}

/// Six templates in class order; `ambiguity` is the bed/sofa look-alike rate.
pub fn default_templates(ambiguity: f64) -> Vec<SceneTemplate> {
    let bed = |family| el(BED, family, (0.35, 0.45), (0.2, 0.28), MAIN).emits(OBJ_BED, 0.9);
    let sofa = |family| el(SOFA, family, (0.35, 0.45), (0.2, 0.28), MAIN).emits(OBJ_COUCH, 0.9);
    let side = |category| el(category, Rectangle, (0.1, 0.14), (0.14, 0.2), SIDE);
    let counter = |category, family| {
        el(category, family, (0.45, 0.6), (0.12, 0.18), BAND).emits(OBJ_SINK, 0.85)
    };
    let appliance =
        |family| el(APPLIANCE, family, (0.1, 0.14), (0.18, 0.24), SIDE).emits(OBJ_OVEN, 0.85);

    let elements = [
        bedroom_like(bed(Rectangle), side(CABINET)),
        room(vec![
            el(
                SHELF,
                Rectangle,
                (0.08, 0.12),
                (0.3, 0.4),
                Region::new(0.1, 0.35, 0.16, 0.45),
            ),
            el(
                RUG,
                Ellipse,
                (0.4, 0.55),
                (0.1, 0.14),
                Region::new(0.4, 0.78, 0.6, 0.84),
            )
            .presence(0.8),
            bed(Ellipse),
        ]),
        bedroom_like(
            sofa(Rectangle).relabel(BED, ambiguity),
            side(CABINET).emits(OBJ_TV, 0.85),
        ),
        room(vec![
            el(
                RUG,
                Rectangle,
                (0.5, 0.6),
                (0.12, 0.16),
                Region::new(0.4, 0.8, 0.6, 0.84),
            )
            .presence(0.8),
            el(
                TABLE,
                Ellipse,
                (0.12, 0.18),
                (0.06, 0.1),
                Region::new(0.3, 0.78, 0.7, 0.86),
            ),
            side(SHELF).emits(OBJ_TV, 0.85),
            sofa(Triangle),
        ]),
        room(vec![
            el(
                WINDOW,
                Rectangle,
                (0.2, 0.3),
                (0.12, 0.18),
                Region::new(0.3, 0.12, 0.7, 0.2),
            )
            .presence(0.8),
            counter(COUNTER, Rectangle),
            appliance(Rectangle),
        ]),
        room(vec![
            el(
                SHELF,
                Rectangle,
                (0.08, 0.12),
                (0.3, 0.4),
                Region::new(0.1, 0.35, 0.16, 0.45),
            ),
            counter(CABINET, Triangle),
            appliance(Ellipse),
        ]),
    ];
    CLASS_NAMES
        .iter()
        .zip(elements)
        .map(|(name, elements)| SceneTemplate {
            name: name.to_string(),
            elements,
        })
        .collect()
}

/// 96x96 frames, 600 training and 200 test samples.
pub fn default_dataset_config(seed: u64) -> DatasetConfig {
    let labels = default_labels();
    DatasetConfig {
        scene: SceneConfig {
            width: 96,
            height: 96,
            seg_categories: labels.seg_categories(),
            obj_categories: labels.obj_categories(),
        },
        templates: default_templates(DEFAULT_AMBIGUITY),
        labels,
        train: 600,
        test: 200,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_validate() {
        let cfg = default_dataset_config(0);
        assert_eq!(cfg.templates.len(), 6);
        for t in &cfg.templates {
            t.validate(cfg.scene.seg_categories, cfg.scene.obj_categories)
                .unwrap();
        }
    }

    #[test]
    fn pairs_share_object_links() {
        let links = |t: &SceneTemplate| {
            let mut v: Vec<_> = t
                .elements
                .iter()
                .filter_map(|e| {
                    e.object.map(|o| {
                        (
                            o.category,
                            o.probability.to_bits(),
                            e.count,
                            format!("{:?}", e.region),
                        )
                    })
                })
                .collect();
            v.sort();
            v
        };
        let t = default_templates(DEFAULT_AMBIGUITY);
        for pair in t.chunks(2) {
            assert_eq!(
                links(&pair[0]),
                links(&pair[1]),
                "{} / {}",
                pair[0].name,
                pair[1].name
            );
        }
    }
}
