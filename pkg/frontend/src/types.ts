// Payload types mirroring the /api/v1 response schemas. The UI never
// computes scores; every number rendered comes from these payloads.

export interface RankedGuiView {
  gui_id: string;
  s1: number;
  s2: number | null;
  ensemble: number;
  rank: number;
  rerank_score: number | null;
}

export interface AspectGuiView {
  gui_id: string;
  component_id: string | null;
  score: number;
  gui_score: number;
}

export interface FeatureView {
  feature_id: string;
  text: string;
  origin: string;
  status: string;
}

export interface RecommendationView {
  feature: FeatureView;
  explanation: string;
  coverage_score: number;
  aspect_ranking: AspectGuiView[];
}

export interface SlotView {
  index: number;
  nlr_gui: string;
  phase: string;
  current_ranking: RankedGuiView[];
  selected_gui: string | null;
  features: FeatureView[];
  aspect_selections: Record<string, AspectGuiView>;
  pending_recommendations: RecommendationView[];
  unmatched_requirements: string[];
  open_aspect_rankings: Record<string, AspectGuiView[]>;
  recommendation_generation: number;
}

export interface SessionView {
  session_id: string;
  app_name: string;
  active_slot_index: number | null;
  created_at: string;
  updated_at: string;
  feature_counter: number;
  slots: SlotView[];
  config: Record<string, unknown>;
}

export interface GuiComponentView {
  component_id: string;
  component_type: string;
  displayed_text: string;
  resource_id: string;
  semantic_classes: string[];
  bounds: [number, number, number, number];
  children: GuiComponentView[];
}

export interface GuiDocumentView {
  schema_version: number;
  gui_id: string;
  app_id: string;
  language_tag: string;
  screenshot: string | null;
  filter_flags: string[];
  s2w_descriptions: string[];
  root: GuiComponentView;
}

export interface ArtifactSlotView {
  nlr_gui: string;
  selected_gui: string;
  aspect_guis: Array<{
    feature_text: string;
    gui_id: string;
    component_id: string | null;
    score: number;
    gui_score: number;
  }>;
  textual_requirements: string[];
}

export interface ArtifactView {
  schema_version: number;
  app_name: string;
  slots: ArtifactSlotView[];
  exported_at: string;
  corpus_hash: string;
  config: Record<string, unknown>;
}

export interface HealthView {
  status: string;
  corpus_size: number;
  embedder: string;
  llm: string;
}

export type FeatureDecision = "select_aspect" | "text_only" | "reject";
export type RecommendationDecision =
  | "select_aspect"
  | "relevant_no_aspect"
  | "not_relevant";
