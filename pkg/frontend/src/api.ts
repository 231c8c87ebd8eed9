// Typed client for the guiscout HTTP API.

import type {
  ArtifactView,
  AspectGuiView,
  FeatureDecision,
  FeatureView,
  GuiDocumentView,
  HealthView,
  RankedGuiView,
  RecommendationDecision,
  RecommendationView,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
    public readonly raw?: string,
  ) {
    super(message);
  }

  /** Transport failures and provider outages are worth retrying as-is. */
  get retryable(): boolean {
    return this.code === "provider_unavailable" || this.code === "network";
  }
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  let response: Response;
  try {
    response = await fetch(path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
  } catch (err) {
    throw new ApiError("network", `request failed: ${String(err)}`, 0);
  }
  const payload = await response.json().catch(() => null);
  if (!response.ok) {
    const error = (payload as { error?: { code?: string; message?: string; raw?: string } })?.error;
    throw new ApiError(
      error?.code ?? "internal",
      error?.message ?? `HTTP ${response.status}`,
      response.status,
      error?.raw,
    );
  }
  return payload as T;
}

export class GuiScoutApi {
  constructor(private readonly base: string = "/api/v1") {}

  health(): Promise<HealthView> {
    return request("GET", `${this.base}/healthz`);
  }

  createSession(appName: string): Promise<{ session: SessionView }> {
    return request("POST", `${this.base}/sessions`, { app_name: appName });
  }

  getSession(sessionId: string): Promise<{ session: SessionView }> {
    return request("GET", `${this.base}/sessions/${sessionId}`);
  }

  submitQuery(
    sessionId: string,
    slot: number,
    text: string,
  ): Promise<{ ranking: RankedGuiView[]; session: SessionView }> {
    return request("POST", `${this.base}/sessions/${sessionId}/slots/${slot}/query`, {
      text,
    });
  }

  selectGui(
    sessionId: string,
    slot: number,
    guiId: string,
  ): Promise<{ session: SessionView }> {
    return request(
      "POST",
      `${this.base}/sessions/${sessionId}/slots/${slot}/select-gui`,
      { gui_id: guiId },
    );
  }

  submitFeature(
    sessionId: string,
    slot: number,
    text: string,
  ): Promise<{ feature: FeatureView; aspect_ranking: AspectGuiView[]; session: SessionView }> {
    return request(
      "POST",
      `${this.base}/sessions/${sessionId}/slots/${slot}/features`,
      { text },
    );
  }

  decideFeature(
    sessionId: string,
    slot: number,
    featureId: string,
    decision: FeatureDecision,
    aspect?: AspectGuiView,
  ): Promise<{ session: SessionView }> {
    return request(
      "POST",
      `${this.base}/sessions/${sessionId}/slots/${slot}/features/${featureId}/decision`,
      { decision, aspect },
    );
  }

  requestRecommendations(
    sessionId: string,
    slot: number,
  ): Promise<{ recommendations: RecommendationView[]; session: SessionView }> {
    return request(
      "POST",
      `${this.base}/sessions/${sessionId}/slots/${slot}/recommendations`,
    );
  }

  decideRecommendation(
    sessionId: string,
    slot: number,
    featureId: string,
    decision: RecommendationDecision,
    aspect?: AspectGuiView,
  ): Promise<{ session: SessionView }> {
    return request(
      "POST",
      `${this.base}/sessions/${sessionId}/slots/${slot}/recommendations/${featureId}/decision`,
      { decision, aspect },
    );
  }

  completeSlot(sessionId: string, slot: number): Promise<{ session: SessionView }> {
    return request(
      "POST",
      `${this.base}/sessions/${sessionId}/slots/${slot}/complete`,
    );
  }

  getArtifact(sessionId: string): Promise<ArtifactView> {
    return request("GET", `${this.base}/sessions/${sessionId}/artifact`);
  }

  getGui(guiId: string): Promise<GuiDocumentView> {
    return request("GET", `${this.base}/guis/${guiId}`);
  }
}
