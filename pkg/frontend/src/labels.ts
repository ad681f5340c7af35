// The seven make-model classes, in the backend's fixed id order. The
// picker must present exactly these, exactly in this order; ids feed the
// decision API directly.

export interface ClassOption {
  id: number;
  name: string;
  hotkey: string; // keyboard-first: 1..7 select a class
}

export const CLASS_OPTIONS: readonly ClassOption[] = [
  { id: 0, name: "Volkswagen Passat", hotkey: "1" },
  { id: 1, name: "Renault Fluence", hotkey: "2" },
  { id: 2, name: "Fiat Linea", hotkey: "3" },
  { id: 3, name: "Volkswagen Polo", hotkey: "4" },
  { id: 4, name: "Renault Toros", hotkey: "5" },
  { id: 5, name: "Fiat Dogan", hotkey: "6" },
  { id: 6, name: "Other", hotkey: "7" },
] as const;

export function classByHotkey(key: string): ClassOption | undefined {
  return CLASS_OPTIONS.find((c) => c.hotkey === key);
}
