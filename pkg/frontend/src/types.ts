// Shapes of the JSON documents served by the graph API.

export type WorkId = string;

export type NodeRole =
  | "Source"
  | "RootSeed"
  | "BranchSeed"
  | "Root"
  | "Branch"
  | "AuthorWork";

export interface RootMetrics {
  kind: "root";
  cited_count: number;
  cocited_count: number;
  cociting_count: number;
  total_rank: number;
}

export interface BranchMetrics {
  kind: "branch";
  citing_count: number;
  cociting_count: number;
  weighted_cocited: number;
  total_rank: number;
}

export type Metrics = RootMetrics | BranchMetrics;

export interface DocumentNode {
  id: WorkId;
  title: string;
  year: number | null;
  doi: string | null;
  authors: string[];
  citations: number;
  role: NodeRole;
  metrics: Metrics | null;
  x: number;
  y: number;
  radius: number;
}

export interface DocumentEdge {
  from: WorkId;
  to: WorkId;
}

export interface YearTick {
  year: number | null;
  y: number;
}

export interface GraphDocument {
  schema_version: number;
  source: WorkId | null;
  built_at: string;
  config: Record<string, number>;
  nodes: DocumentNode[];
  edges: DocumentEdge[];
  year_ticks: YearTick[];
  diagnostics: Record<string, unknown>;
}
