// Chat-guided dialogue flow. Holds the transcript and the workbench focus;
// every state change round-trips through the API and re-reads the returned
// session, so the client never invents state (no optimistic updates).

import { ApiError, GuiScoutApi } from "./api.js";
import type {
  ArtifactView,
  AspectGuiView,
  FeatureDecision,
  RecommendationDecision,
  RecommendationView,
  SessionView,
  SlotView,
} from "./types.js";

export interface ChatMessage {
  role: "assistant" | "user" | "error";
  text: string;
  retryable?: boolean;
}

export type WorkbenchFocus =
  | { kind: "empty" }
  | { kind: "ranking" }
  | { kind: "aspects"; featureId: string; featureText: string; aspects: AspectGuiView[] };

export class ChatFlow {
  session: SessionView | null = null;
  messages: ChatMessage[] = [];
  focus: WorkbenchFocus = { kind: "empty" };

  constructor(private readonly api: GuiScoutApi) {}

  private say(text: string): void {
    this.messages.push({ role: "assistant", text });
  }

  private echo(text: string): void {
    this.messages.push({ role: "user", text });
  }

  private fail(err: unknown): never {
    if (err instanceof ApiError) {
      this.messages.push({
        role: "error",
        text: `${err.message} (${err.code})`,
        retryable: err.retryable,
      });
    } else {
      this.messages.push({ role: "error", text: String(err) });
    }
    throw err;
  }

  get slotIndex(): number {
    return this.session?.active_slot_index ?? 0;
  }

  get slot(): SlotView | null {
    if (!this.session || this.session.active_slot_index === null) {
      return null;
    }
    return this.session.slots[this.session.active_slot_index] ?? null;
  }

  /** The next recommendation card, or null when the queue is drained. */
  get currentRecommendation(): RecommendationView | null {
    return this.slot?.pending_recommendations[0] ?? null;
  }

  get completedSlots(): SlotView[] {
    return this.session?.slots.filter((s) => s.phase === "done") ?? [];
  }

  async start(appName: string): Promise<void> {
    try {
      const { session } = await this.api.createSession(appName);
      this.session = session;
      this.say(
        `Let's prototype "${appName}". Describe the first screen you need ` +
          `in your own words.`,
      );
    } catch (err) {
      this.fail(err);
    }
  }

  async submitQuery(text: string): Promise<void> {
    if (!this.session) throw new Error("no session");
    this.echo(text);
    try {
      const { ranking, session } = await this.api.submitQuery(
        this.session.session_id,
        this.slotIndex,
        text,
      );
      this.session = session;
      this.focus = { kind: "ranking" };
      this.say(
        `Here are the ${ranking.length} closest screens. Pick one with ` +
          `"Use this screen", or describe an individual feature to search for.`,
      );
    } catch (err) {
      this.fail(err);
    }
  }

  async submitFeature(text: string): Promise<void> {
    if (!this.session) throw new Error("no session");
    this.echo(text);
    try {
      const { feature, aspect_ranking, session } = await this.api.submitFeature(
        this.session.session_id,
        this.slotIndex,
        text,
      );
      this.session = session;
      this.focus = {
        kind: "aspects",
        featureId: feature.feature_id,
        featureText: feature.text,
        aspects: aspect_ranking,
      };
      this.say(
        `These screens may already contain "${feature.text}" (matched ` +
          `component outlined). Select a match, keep it as a text ` +
          `requirement, or discard it.`,
      );
    } catch (err) {
      this.fail(err);
    }
  }

  async decideFeature(
    featureId: string,
    decision: FeatureDecision,
    aspect?: AspectGuiView,
  ): Promise<void> {
    if (!this.session) throw new Error("no session");
    try {
      const { session } = await this.api.decideFeature(
        this.session.session_id,
        this.slotIndex,
        featureId,
        decision,
        aspect,
      );
      this.session = session;
      this.focus = { kind: "ranking" };
      if (decision === "select_aspect") {
        this.say(
          "Noted. I reordered the screens to favor ones covering your " +
            "confirmed features.",
        );
      } else if (decision === "text_only") {
        this.say("Kept as a written requirement without a matching screen.");
      } else {
        this.say("Discarded.");
      }
    } catch (err) {
      this.fail(err);
    }
  }

  async selectGui(guiId: string): Promise<void> {
    if (!this.session) throw new Error("no session");
    try {
      const { session } = await this.api.selectGui(
        this.session.session_id,
        this.slotIndex,
        guiId,
      );
      this.session = session;
      this.say(
        `"${guiId}" is now the screen for this slot. Want feature ` +
          `suggestions for it?`,
      );
    } catch (err) {
      this.fail(err);
    }
  }

  async requestRecommendations(): Promise<void> {
    if (!this.session) throw new Error("no session");
    try {
      const { recommendations, session } = await this.api.requestRecommendations(
        this.session.session_id,
        this.slotIndex,
      );
      this.session = session;
      this.say(
        `I have ${recommendations.length} feature suggestions. I'll show ` +
          `them one at a time.`,
      );
    } catch (err) {
      this.fail(err);
    }
  }

  async decideRecommendation(
    decision: RecommendationDecision,
    aspect?: AspectGuiView,
  ): Promise<void> {
    if (!this.session) throw new Error("no session");
    const current = this.currentRecommendation;
    if (!current) throw new Error("no pending recommendation");
    try {
      const { session } = await this.api.decideRecommendation(
        this.session.session_id,
        this.slotIndex,
        current.feature.feature_id,
        decision,
        aspect,
      );
      this.session = session;
      if (decision === "select_aspect") {
        this.focus = { kind: "ranking" };
        this.say("Added with its matching screen; ranking updated.");
      } else if (decision === "relevant_no_aspect") {
        this.say("Added as a written requirement.");
      } else {
        this.say("Skipped.");
      }
      const next = this.currentRecommendation;
      if (next) {
        this.say(`Next suggestion: "${next.feature.text}".`);
      } else {
        this.say(
          "That was the last suggestion. Complete this screen or keep refining it.",
        );
      }
    } catch (err) {
      this.fail(err);
    }
  }

  async completeSlot(): Promise<void> {
    if (!this.session) throw new Error("no session");
    try {
      const { session } = await this.api.completeSlot(
        this.session.session_id,
        this.slotIndex,
      );
      this.session = session;
      this.focus = { kind: "empty" };
      this.say(
        "Screen added to the app preview. Describe the next screen, or " +
          "export the prototype specification.",
      );
    } catch (err) {
      this.fail(err);
    }
  }

  async fetchArtifact(): Promise<ArtifactView> {
    if (!this.session) throw new Error("no session");
    try {
      return await this.api.getArtifact(this.session.session_id);
    } catch (err) {
      this.fail(err);
    }
  }
}
